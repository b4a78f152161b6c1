//! Time evolution: Schrödinger, composition, unitarity, Dyson and Heisenberg
//! checks on both spaces, whole-space integrals, integration by parts and
//! sesquilinear forms.

use num_complex::Complex64;
use qspace_core::evolution::*;
use qspace_core::ncalgebra::{ActMode, Calculus, NCElement};
use qspace_core::qfunc::{CFunction, JacksonBound, LatticeFunction};
use qspace_core::{QScalar, Space};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn mono(space: Space, e: &[u16]) -> CFunction {
    let mut m = [0u16; 8];
    m[..e.len()].copy_from_slice(e);
    CFunction::monomial(space, m, QScalar::one())
}

#[test]
fn free_evolution_suite_passes_on_both_spaces() {
    for space in [Space::Line, Space::Euclid3] {
        for rep in evolution_suite(space, 4) {
            assert!(rep.passed(), "{space}: {rep:?}");
        }
    }
}

#[test]
fn free_hamiltonians_are_hermitian() {
    for space in [Space::Line, Space::Euclid3] {
        let h = Hamiltonian::free(space);
        assert!(Hamiltonian::new(h.op.clone(), true).is_ok());
    }
    let d1 = NCElement::d(Space::Line, Calculus::Std, 1);
    assert!(Hamiltonian::new(d1.scale(&QScalar::i()), true).is_ok());
    assert!(Hamiltonian::new(d1, true).is_err());
    assert!(Hamiltonian::new(NCElement::x(Space::Line, 0), false).is_err());
}

#[test]
fn evolution_with_non_free_hamiltonian() {
    // H = X¹∂₁ (coordinates and derivatives mixed)
    let l = Space::Line;
    let op = NCElement::x(l, 1).mul(&NCElement::d(l, Calculus::Std, 1)).unwrap();
    let h = Hamiltonian::new(op, false).unwrap();
    assert!(schrodinger_check(&h, 4).passed());
    assert!(compose_check(&h, 4).passed());
    assert!(dyson_check(&h, 4).passed());
    assert!(heisenberg_check(&NCElement::x(l, 1), &h, 3).passed());
    let inv = build_u(&h, 4, Direction::Forward).mul(&build_u(&h, 4, Direction::Inverse)).unwrap();
    assert!(inv.is_identity());
}

#[test]
fn heisenberg_of_hamiltonian_is_constant() {
    let h = Hamiltonian::free(Space::Euclid3);
    let s = heisenberg_evolve(&h.op, &h, 3, Picture::Unprimed).unwrap();
    assert_eq!(s.coeffs[0], h.op);
    assert!(s.coeffs[1..].iter().all(|c| c.is_zero()));
}

#[test]
fn heisenberg_classical_limit_on_monomials() {
    for space in [Space::Line, Space::Euclid3] {
        let h = Hamiltonian::free(space);
        for i in 1..space.dim() {
            for j in i..space.dim() {
                for k in j..space.dim() {
                    let xi = NCElement::x(space, i);
                    let o = xi.mul(&NCElement::x(space, j)).unwrap().mul(&NCElement::x(space, k)).unwrap();
                    for obs in [xi, o] {
                        let rep = heisenberg_classical_check(&obs, &h, 3);
                        assert!(rep.passed(), "{rep:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn integration_by_parts_symbolic() {
    let l = Space::Line;
    let (a, b) = (QScalar::ratio(1, 2), QScalar::int(3));
    let one = CFunction::one(l);
    assert!(ibp_check(&one, &one, &a, &b).passed());
    let x = mono(l, &[0, 1]);
    assert!(ibp_check(&x, &x, &a, &b).passed());
    let f = mono(l, &[1, 2]).add(&mono(l, &[0, 3]).scale(&QScalar::q()));
    let g = mono(l, &[2, 1]).add(&mono(l, &[0, 0]));
    let rep = ibp_check(&f, &g, &QScalar::int(-2), &QScalar::q());
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn integration_by_parts_numeric() {
    let f = |x: f64| c((-x * x).exp());
    let g = |x: f64| c(x / (1.0 + x * x) + 0.5);
    let rep = ibp_numeric_check(f, g, 1.1, 500, 3, 1e-9);
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn whole_line_integrals() {
    let q0 = 1.1;
    let zero = LatticeFunction::zero(q0, 400);
    assert_eq!(integrate_whole_line(&zero, IntegralVariant::L, 1e-12).unwrap(), c(0.0));
    let bump = LatticeFunction::from_fn(q0, 400, |x| c((-x * x).exp()));
    let l = integrate_whole_line(&bump, IntegralVariant::L, 1e-14).unwrap();
    let rbar = integrate_whole_line(&bump, IntegralVariant::RBar, 1e-14).unwrap();
    assert!((l + rbar).norm() < 1e-12);
    let lbar = integrate_whole_line(&bump, IntegralVariant::LBar, 1e-14).unwrap();
    let r = integrate_whole_line(&bump, IntegralVariant::R, 1e-14).unwrap();
    assert!((lbar + r).norm() < 1e-12);
    // independent oracle: (q−1) Σ_k q^k e^{−q^{2k}} on both half lines
    let direct: f64 = (-400..=400).map(|k| (q0 - 1.0) * q0.powi(k) * (-q0.powi(2 * k)).exp()).sum::<f64>() * 2.0;
    assert!((l.re - direct).abs() < 1e-10, "{l} vs {direct}");
    // a coarse geometric Riemann sum of the classical Gaussian integral
    assert!((l.re - std::f64::consts::PI.sqrt()).abs() < 0.1, "{l}");
}

#[test]
fn whole_space_integrals_3d() {
    let q0 = 1.5;
    let f = |a: f64, b: f64, m: f64| c((-(a * a + b * b + m * m)).exp());
    let l = integrate_whole_3d(f, q0, 90, IntegralVariant::L, 1e-13).unwrap();
    let rbar = integrate_whole_3d(f, q0, 90, IntegralVariant::RBar, 1e-13).unwrap();
    assert!((l + rbar).norm() < 1e-12);
    // separable oracle: q⁻⁶/4 times the cube of the one-dimensional sum
    let lat2 = LatticeFunction::from_fn(q0, 90, |x| c((-x * x).exp()));
    let mut s = Complex64::new(0.0, 0.0);
    for b in [JacksonBound::ZeroToX, JacksonBound::XToInf, JacksonBound::NegInfToX, JacksonBound::XToZero] {
        s += qspace_core::qfunc::jackson_integral_numeric(&lat2, 2, b, 0, 1e-13).unwrap();
    }
    let want = s * s * s * q0.powi(-6) / 4.0;
    assert!((l - want).norm() < 1e-9, "{l} vs {want}");
    let zero = integrate_whole_3d(|_, _, _| c(0.0), q0, 20, IntegralVariant::LBar, 1e-12).unwrap();
    assert_eq!(zero, c(0.0));
}

#[test]
fn sesquilinear_forms_on_the_line() {
    let q0 = 1.1;
    let zero = LatticeFunction::zero(q0, 400);
    assert_eq!(sesquilinear(&zero, &zero, SesqForm::One, 1e-12).unwrap(), c(0.0));
    let f = LatticeFunction::from_fn(q0, 400, |x| c((-x * x).exp()));
    let g = LatticeFunction::from_fn(q0, 400, |x| Complex64::new(x, 1.0) * (-x * x).exp());
    let gamma_l = sesquilinear(&f, &g, SesqForm::Gamma(IntegralVariant::L), 1e-14).unwrap();
    assert!(gamma_l.norm() > 0.1);
    // time-independent arguments: a time shift changes nothing
    let shifted = sesquilinear(&f.map(|_, v| v), &g.map(|_, v| v), SesqForm::One, 1e-14).unwrap();
    assert_eq!(shifted, sesquilinear(&f, &g, SesqForm::One, 1e-14).unwrap());
    let rep = sesquilinear_report(&f, &g, 1e-12);
    assert!(rep.passed());
    assert_eq!(rep.notes.len(), 12);
}

#[test]
fn schrodinger_residual_of_zero_hamiltonian() {
    let h = Hamiltonian::zero(Space::Euclid3);
    let u = build_u(&h, 3, Direction::Forward);
    assert!(u.is_identity());
    for mode in ActMode::ALL {
        assert!(schrodinger_residual(&u, &h, mode).passed());
    }
}
