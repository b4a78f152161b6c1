//! Superanalysis on the antisymmetrized braided line.

use qspace_core::evolution::IntegralVariant;
use qspace_core::grassmann::*;
use qspace_core::hopf::HopfVariant;
use qspace_core::ncalgebra::{ActMode, Side};
use qspace_core::QScalar;

fn all_words(max_len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w: &Vec<u8>| (0..4u8).map(move |g| [w.clone(), vec![g]].concat()))
            .collect();
        out.extend(layer.clone());
    }
    out
}

#[test]
fn every_identity_holds() {
    let rep = grassmann_check();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn normal_forms_are_nilpotent_and_ordered() {
    for calc in [GCalculus::Std, GCalculus::Hat] {
        for side in [Side::CoordFirst, Side::DerivFirst] {
            for w in all_words(4) {
                let e = g_normal_form(calc, side, &w, QScalar::one());
                for (m, _) in e.terms() {
                    let thetas: Vec<u8> = m.iter().copied().filter(|&g| g < 2).collect();
                    let derivs: Vec<u8> = m.iter().copied().filter(|&g| g >= 2).collect();
                    assert!(thetas.windows(2).all(|p| p[0] < p[1]), "{w:?} -> {m:?}");
                    assert!(derivs.windows(2).all(|p| p[0] < p[1]), "{w:?} -> {m:?}");
                    // all θ's on one side of all derivatives
                    let kinds: Vec<bool> = m.iter().map(|&g| g < 2).collect();
                    let ordered = match side {
                        Side::CoordFirst => kinds.windows(2).all(|p| p[0] || !p[1]),
                        Side::DerivFirst => kinds.windows(2).all(|p| !p[0] || p[1]),
                    };
                    assert!(ordered, "{w:?} -> {m:?}");
                }
            }
        }
    }
}

#[test]
fn pure_theta_words_are_antisymmetric() {
    for w in all_words(3).into_iter().filter(|w| w.iter().all(|&g| g < 2)) {
        let e = g_normal_form(GCalculus::Std, Side::CoordFirst, &w, QScalar::one());
        let mut sorted = w.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() < w.len() {
            assert!(e.is_zero(), "{w:?}");
        } else {
            let inversions = (0..w.len()).flat_map(|i| (i + 1..w.len()).map(move |j| (i, j))).filter(|&(i, j)| w[i] > w[j]).count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            assert_eq!(e.coeff(&sorted), QScalar::int(sign), "{w:?}");
        }
    }
}

#[test]
fn supernumber_calculus() {
    let f = SuperNumber::new(QScalar::int(3), QScalar::int(5));
    assert_eq!(g_derivative(&f, ActMode::LeftHat).unwrap(), QScalar::int(5));
    assert_eq!(g_derivative(&f, ActMode::RightHat).unwrap(), QScalar::int(-5));
    assert_eq!(g_integral(&f, IntegralVariant::L).unwrap(), QScalar::int(5));
    assert_eq!(g_integral(&f, IntegralVariant::R).unwrap(), QScalar::int(-5));
    let c = SuperNumber::new(QScalar::int(2), QScalar::zero());
    assert_eq!(g_integral(&c, IntegralVariant::LBar).unwrap(), QScalar::zero());
    let theta = SuperNumber::new(QScalar::zero(), QScalar::one());
    let t = g_translate(&theta, HopfVariant::L);
    assert_eq!((t.body, t.theta, t.psi), (QScalar::zero(), QScalar::one(), QScalar::one()));
    assert_eq!(g_antipode(&c, HopfVariant::LBar), c);
    for kind in GExpKind::ALL {
        assert_eq!(g_delta(kind).unwrap(), QScalar::one());
    }
}
