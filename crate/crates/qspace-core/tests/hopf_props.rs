//! Translations, antipodes and Taylor rules.

use qspace_core::hopf::{antipode, taylor_identity_check, translate, HopfVariant, TaylorRule};
use qspace_core::qfunc::{monomials_up_to, CFunction};
use qspace_core::{QScalar, Space};

#[test]
fn taylor_rules_hold_through_degree_3() {
    for space in [Space::Line, Space::Euclid3] {
        for rule in TaylorRule::ALL {
            let r = taylor_identity_check(space, rule, 3);
            assert!(r.passed(), "{space} {rule:?}: {:#?}", &r.failures[..r.failures.len().min(3)]);
        }
    }
}

#[test]
fn counit_law() {
    for space in [Space::Line, Space::Euclid3] {
        let d = space.dim();
        for v in [HopfVariant::L, HopfVariant::LBar] {
            for m in monomials_up_to(d, 4) {
                let f = CFunction::monomial(space, m, QScalar::one());
                let t = translate(space, v, &f);
                let mut at_zero = t.clone();
                for i in d..2 * d {
                    at_zero = at_zero.set_zero(i);
                }
                assert_eq!(at_zero.drop_second_leg(), f, "{space} {v:?} {f}");
                // and x = 0 gives f(y)
                let mut x_zero = t;
                for i in 0..d {
                    x_zero = x_zero.set_zero(i);
                }
                assert_eq!(x_zero, f.to_second_leg().with_legs(2), "{space} {v:?} {f}");
            }
        }
    }
}

#[test]
fn classical_translation_limit() {
    for space in [Space::Line, Space::Euclid3] {
        let d = space.dim();
        for v in [HopfVariant::L, HopfVariant::LBar] {
            for m in monomials_up_to(d, 4) {
                let f = CFunction::monomial(space, m, QScalar::one());
                // f(x + y) classically
                let mut shifted = CFunction::one(space).with_legs(2);
                for i in 0..d {
                    let s = CFunction::var(space, i).with_legs(2).add(&CFunction::var(space, i).to_second_leg().with_legs(2));
                    shifted = shifted.mul(&s.pow(m[i] as u32));
                }
                assert_eq!(translate(space, v, &f).at_one().unwrap(), shifted.at_one().unwrap(), "{space} {v:?} {f}");
            }
        }
    }
}

#[test]
fn line_antipodes_are_mutually_inverse() {
    let l = Space::Line;
    for m in monomials_up_to(2, 5) {
        let f = CFunction::monomial(l, m, QScalar::one());
        assert_eq!(antipode(l, HopfVariant::LBar, &antipode(l, HopfVariant::L, &f)), f);
    }
}

#[test]
fn euclid_antipode_classical_limit() {
    let e = Space::Euclid3;
    for v in [HopfVariant::L, HopfVariant::LBar] {
        for m in monomials_up_to(4, 4) {
            let f = CFunction::monomial(e, m, QScalar::one());
            let deg: u32 = m.iter().map(|&k| k as u32).sum();
            let want = if deg % 2 == 0 { f.clone() } else { f.neg() };
            assert_eq!(antipode(e, v, &f).at_one().unwrap(), want.at_one().unwrap());
        }
    }
}

#[test]
fn antipode_axiom_on_euclid_space() {
    use qspace_core::hopf::antipode;
    use qspace_core::starcalc::{star, StarContext, StarOrdering};
    // Σ S(f₍₁₎) ⋆ f₍₂₎ = ε(f) with f(x ⊕ y) = Σ f₍₁₎(x) f₍₂₎(y).
    let e = Space::Euclid3;
    for (v, ord) in [(HopfVariant::LBar, StarOrdering::Standard), (HopfVariant::L, StarOrdering::Reversed)] {
        let ctx = StarContext::new(e, ord);
        for m in monomials_up_to(4, 3) {
            let f = CFunction::monomial(e, m, QScalar::one());
            let mut acc = CFunction::zero(e);
            for (mono, c) in translate(e, v, &f).terms() {
                let mut x = [0u16; 8];
                let mut y = [0u16; 8];
                x[..4].copy_from_slice(&mono[..4]);
                y[..4].copy_from_slice(&mono[4..8]);
                let sx = antipode(e, v, &CFunction::monomial(e, x, c.clone()));
                acc = acc.add(&star(ctx, &sx, &CFunction::monomial(e, y, QScalar::one())));
            }
            let want = if m.iter().all(|&k| k == 0) { CFunction::one(e) } else { CFunction::zero(e) };
            assert_eq!(acc, want, "{v:?} {f}");
        }
    }
}
