//! Rewriting-system properties: confluence against an independent naive
//! rewriter, associativity, and conjugation compatibility.

use qspace_core::ncalgebra::{normal_form, normal_form_naive, Calculus, Gen, NCElement, Ordering, Side, CoordOrder, Strategy};
use qspace_core::{QScalar, Space};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORDERINGS: [Ordering; 4] = [
    Ordering { coords: CoordOrder::Std, side: Side::CoordFirst },
    Ordering { coords: CoordOrder::Std, side: Side::DerivFirst },
    Ordering { coords: CoordOrder::Rev, side: Side::CoordFirst },
    Ordering { coords: CoordOrder::Rev, side: Side::DerivFirst },
];

fn random_word(rng: &mut ChaCha8Rng, space: Space, max_len: usize, with_lambda: bool) -> Vec<Gen> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let k = rng.gen_range(0..if with_lambda { 5 } else { 4 });
            let i = rng.gen_range(0..space.dim());
            match k {
                0 | 1 => Gen::X(i),
                2 | 3 => Gen::D(i),
                _ => Gen::Lam(if rng.gen_bool(0.5) { 1 } else { -1 }),
            }
        })
        .collect()
}

#[test]
fn normal_forms_are_strategy_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for space in [Space::Line, Space::Euclid3] {
        for calc in [Calculus::Std, Calculus::Conj] {
            for ord in ORDERINGS {
                for _ in 0..32 {
                    let w = random_word(&mut rng, space, 6, true);
                    let e = normal_form(space, calc, ord, &w, QScalar::one()).unwrap();
                    let l = normal_form_naive(space, calc, ord, &w, Strategy::Leftmost).unwrap();
                    let r = normal_form_naive(space, calc, ord, &w, Strategy::Rightmost).unwrap();
                    assert_eq!(e, l, "{space} {calc:?} {ord:?} {w:?}: engine vs leftmost");
                    assert_eq!(l, r, "{space} {calc:?} {ord:?} {w:?}: leftmost vs rightmost");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 500);
}

#[test]
fn products_are_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for space in [Space::Line, Space::Euclid3] {
        for calc in [Calculus::Std, Calculus::Conj] {
            for _ in 0..25 {
                let ord = ORDERINGS[rng.gen_range(0..4)];
                let mut el = || normal_form(space, calc, ord, &random_word(&mut rng, space, 3, true), QScalar::one()).unwrap();
                let (a, b, c) = (el(), el(), el());
                let l = a.mul(&b).unwrap().mul(&c).unwrap();
                let r = a.mul(&b.mul(&c).unwrap()).unwrap();
                assert_eq!(l, r);
            }
        }
    }
}

#[test]
fn orderings_represent_the_same_element() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for space in [Space::Line, Space::Euclid3] {
        for calc in [Calculus::Std, Calculus::Conj] {
            for _ in 0..20 {
                let w = random_word(&mut rng, space, 5, true);
                let base = normal_form(space, calc, Ordering::STD, &w, QScalar::one()).unwrap();
                for ord in ORDERINGS {
                    let other = normal_form(space, calc, ord, &w, QScalar::one()).unwrap();
                    assert_eq!(other.to_ordering(Ordering::STD), base, "{w:?} via {ord:?}");
                }
            }
        }
    }
}

#[test]
fn conjugation_is_an_antilinear_antihomomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for space in [Space::Line, Space::Euclid3] {
        for calc in [Calculus::Std, Calculus::Conj] {
            for _ in 0..25 {
                let mut el = || {
                    normal_form(space, calc, Ordering::STD, &random_word(&mut rng, space, 3, true), QScalar::one() + QScalar::i() * QScalar::int(2)).unwrap()
                };
                let (a, b) = (el(), el());
                let lhs = a.mul(&b).unwrap().conjugate();
                let rhs = b.conjugate().mul(&a.conjugate()).unwrap();
                assert_eq!(lhs.to_ordering(Ordering::STD), rhs.to_ordering(Ordering::STD));
                assert_eq!(a.conjugate().conjugate().to_ordering(Ordering::STD), a);
            }
        }
    }
}

#[test]
fn coordinate_relations_hold_in_both_calculi() {
    // Coordinates commute identically in both calculi; the conjugate of a
    // pure-coordinate relation is again one.
    for space in [Space::Line, Space::Euclid3] {
        let n = space.dim();
        for i in 0..n {
            for j in 0..n {
                let a = normal_form(space, Calculus::Std, Ordering::STD, &[Gen::X(i), Gen::X(j)], QScalar::one()).unwrap();
                let b = normal_form(space, Calculus::Conj, Ordering::STD, &[Gen::X(i), Gen::X(j)], QScalar::one()).unwrap();
                assert_eq!(a.retag(Calculus::Conj), b);
                let _: NCElement = a.conjugate();
            }
        }
    }
}
