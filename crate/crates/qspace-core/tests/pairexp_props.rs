//! Pairings on monomials and the duality of the q-exponentials.

use qspace_core::pairexp::{pair_word, qexp, ExpKind, PairOrder, PairingVariant};
use qspace_core::qfunc::{monomials_up_to, CFunction};
use qspace_core::qscalar::{factorial, qfactorial};
use qspace_core::{QScalar, Space};

fn weight(space: Space, n: &[u16; 8], s: i32) -> QScalar {
    match space {
        Space::Line => factorial(n[0] as u32) * qfactorial(n[1] as u32, s),
        Space::Euclid3 => {
            factorial(n[0] as u32) * qfactorial(n[1] as u32, 4 * s) * qfactorial(n[2] as u32, 2 * s) * qfactorial(n[3] as u32, 4 * s)
        }
    }
}

fn word(n: &[u16; 8], order: &[usize]) -> Vec<usize> {
    order.iter().flat_map(|&i| std::iter::repeat(i).take(n[i] as usize)).collect()
}

#[test]
fn monomial_pairings_match_factorial_tables() {
    for space in [Space::Line, Space::Euclid3] {
        let (std_word, hat_word): (Vec<usize>, Vec<usize>) = match space {
            Space::Line => (vec![0, 1], vec![0, 1]),
            Space::Euclid3 => (vec![0, 3, 2, 1], vec![0, 1, 2, 3]),
        };
        let ms = monomials_up_to(space.dim(), 3);
        for n in &ms {
            for m in &ms {
                let f = CFunction::monomial(space, *m, QScalar::one());
                let delta = n == m;
                let sign = if n.iter().map(|&k| k as u32).sum::<u32>() % 2 == 0 { QScalar::one() } else { -QScalar::one() };
                let cases = [
                    (PairingVariant::LRbar, PairOrder::DerivFirst, &std_word, 1, QScalar::one()),
                    (PairingVariant::LbarR, PairOrder::DerivFirst, &hat_word, -1, QScalar::one()),
                    (PairingVariant::LRbar, PairOrder::CoordFirst, &std_word, 1, sign.clone()),
                    (PairingVariant::LbarR, PairOrder::CoordFirst, &hat_word, -1, sign.clone()),
                ];
                for (var, ord, wo, s, sg) in cases {
                    let got = pair_word(space, var, ord, &word(n, wo), &f).unwrap();
                    let want = if delta { sg * weight(space, m, s) } else { QScalar::zero() };
                    assert_eq!(got, want, "{space} {var:?} {ord:?} n={n:?} m={m:?}");
                }
            }
        }
    }
}

#[test]
fn exponentials_reconstruct_monomials() {
    for space in [Space::Line, Space::Euclid3] {
        for kind in ExpKind::ALL {
            let e = qexp(space, kind, 4);
            for m in monomials_up_to(space.dim(), 4) {
                let v = CFunction::monomial(space, m, QScalar::one());
                assert_eq!(e.reconstruct(&v).unwrap(), v, "{space} {kind:?} {v}");
            }
            let too_big = CFunction::monomial(space, [0, 5, 0, 0, 0, 0, 0, 0], QScalar::one());
            assert!(e.reconstruct(&too_big).is_err());
        }
    }
}

#[test]
fn line_coefficients_reduce_to_classical() {
    let e = qexp(Space::Line, ExpKind::CoordDeriv, 4);
    for t in &e.terms {
        let want = (factorial(t.coord[0] as u32) * factorial(t.coord[1] as u32)).inv();
        assert_eq!(t.coeff.at_one().unwrap(), want.at_one().unwrap());
    }
}

#[test]
fn derivative_first_exponentials_follow_the_substitution() {
    // exp(∂|x) pairs (−1)^n ∂₀^{n₀}∂₋^{n₋}∂₃^{n₃}∂₊^{n₊} with x⁰x⁺x³x⁻ monomials.
    let e = qexp(Space::Euclid3, ExpKind::DerivCoord, 2);
    let t = e.terms.iter().find(|t| t.coord == [0, 1, 0, 1, 0, 0, 0, 0]).unwrap();
    assert_eq!(t.derivs, vec![3, 1]);
    assert_eq!(t.coeff, QScalar::one());
    let t = e.terms.iter().find(|t| t.coord == [0, 0, 1, 0, 0, 0, 0, 0]).unwrap();
    assert_eq!((t.derivs.clone(), t.coeff.clone()), (vec![2], -QScalar::one()));
}
