//! Verification suites. Each suite bundles the kernel's checks into
//! [`VerificationReport`]s; suites run in parallel and their reports are
//! returned in suite-name order.

use num_complex::Complex64;
use rayon::prelude::*;

use qspace_core::evolution::{
    evolution_suite, ibp_check, ibp_numeric_check, integrate_whole_line, sesquilinear_report, IntegralVariant,
};
use qspace_core::grassmann::grassmann_check;
use qspace_core::hopf::{antipode, taylor_identity_check, translate, HopfVariant, TaylorRule};
use qspace_core::ncalgebra::{
    act_cf, normal_form, action_symbol_word, ActMode, Calculus, Gen, NCElement, Ordering, HAT_COEFF_NOTE, HAT_TIME_NOTE,
};
use qspace_core::pairexp::{pair_word, qexp, ExpKind, PairOrder, PairingVariant};
use qspace_core::qfunc::{
    act_inverse_partial, act_partial_closed, jackson_antiderivative, jackson_d, jackson_integral_numeric,
    monomials_up_to, partial, CFunction, CMono, JacksonBound, LatticeFunction,
};
use qspace_core::qscalar::{factorial, qfactorial};
use qspace_core::report::VerificationReport;
use qspace_core::rmatrix::{
    build_projectors, build_r, check_ybe, metric_check, projector_algebra_check, relations_check, spectral_check,
};
use qspace_core::starcalc::{star, star_oracle_check, StarContext, StarOrdering};
use qspace_core::{QScalar, Space};

use crate::error::CliError;

/// Every suite name, sorted.
pub const SUITES: [&str; 11] = [
    "evolution",
    "grassmann",
    "hopf-taylor",
    "metric",
    "numeric-integrals",
    "oracle-actions",
    "pairings",
    "projectors",
    "relations",
    "star",
    "ybe",
];

const SPACES: [Space; 2] = [Space::Line, Space::Euclid3];

/// Truncation order, tolerance and degree bound shared by the suites.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteOptions {
    /// truncation order of the time-evolution series
    pub order: usize,
    /// tolerance of numeric comparisons
    pub tol: f64,
    /// total-degree bound of the monomials exercised
    pub degree: u32,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { order: 4, tol: 1e-10, degree: 4 }
    }
}

/// Runs the named suites (duplicates are ignored) and returns their reports
/// ordered by suite name.
pub fn run_suite<S: AsRef<str>>(names: &[S], opts: &SuiteOptions) -> Result<Vec<VerificationReport>, CliError> {
    let mut wanted: Vec<&'static str> = Vec::new();
    for n in names {
        let n = n.as_ref();
        let known = SUITES
            .iter()
            .find(|s| **s == n)
            .ok_or_else(|| CliError::UnknownSuite(n.to_string(), SUITES.join(", ")))?;
        wanted.push(known);
    }
    wanted.sort();
    wanted.dedup();
    let results: Vec<Vec<VerificationReport>> = wanted.par_iter().map(|s| run_one(s, opts)).collect();
    Ok(results.into_iter().flatten().collect())
}

fn run_one(name: &str, o: &SuiteOptions) -> Vec<VerificationReport> {
    match name {
        "ybe" => SPACES.iter().map(|&s| check_ybe(&build_r(s))).collect(),
        "projectors" => SPACES
            .iter()
            .flat_map(|&s| {
                let ps = build_projectors(s);
                [projector_algebra_check(s, &ps), spectral_check(&build_r(s), &ps)]
            })
            .collect(),
        "relations" => SPACES.iter().flat_map(|&s| [relations_check(s), leibniz_conjugation_check(s)]).collect(),
        "metric" => vec![metric_check()],
        "oracle-actions" => SPACES
            .par_iter()
            .flat_map(|&s| vec![action_oracle_check(s, o.degree), inverse_action_check(s, o.degree), action_classical_check(s, o.degree)])
            .collect(),
        "star" => SPACES
            .par_iter()
            .flat_map(|&s| vec![star_oracle_check(s, o.degree), star_associativity_check(s, o.degree), star_classical_check(s, o.degree)])
            .collect(),
        "hopf-taylor" => {
            let deg = o.degree.min(3);
            let mut out: Vec<VerificationReport> = SPACES
                .par_iter()
                .flat_map(|&s| TaylorRule::ALL.par_iter().map(move |&r| taylor_identity_check(s, r, deg)))
                .collect();
            out.extend(SPACES.iter().map(|&s| translation_classical_check(s, o.degree)));
            out
        }
        "pairings" => SPACES
            .par_iter()
            .flat_map(|&s| vec![pairing_table_check(s, o.degree.min(3)), exp_check(s, o.degree)])
            .collect(),
        "evolution" => SPACES.par_iter().flat_map(|&s| evolution_suite(s, o.order)).collect(),
        "grassmann" => vec![grassmann_check()],
        "numeric-integrals" => vec![
            jackson_inverse_check(6),
            jackson_numeric_check(o.tol),
            ibp_symbolic_suite(),
            ibp_numeric_check(gauss, shifted_rational, 1.1, 500, 3, 1e-9_f64.max(o.tol)),
            whole_line_check(o.tol),
            sesquilinear_suite(o.tol),
        ],
        _ => unreachable!("suite names are validated by run_suite"),
    }
}

fn deg(m: &CMono) -> u32 {
    m.iter().map(|&k| k as u32).sum()
}

fn mono(space: Space, m: CMono) -> CFunction {
    CFunction::monomial(space, m, QScalar::one())
}

// ---------------------------------------------------------------------------
// relations
// ---------------------------------------------------------------------------

/// Normal-ordering `∂_i X^j` and conjugating must agree with normal-ordering
/// the conjugated factors in the conjugate calculus (both directions), and
/// the hatted time derivative must be central.
pub fn leibniz_conjugation_check(space: Space) -> VerificationReport {
    let mut rep = VerificationReport::new("leibniz-conjugation", space.name());
    let n = space.dim();
    for calc in [Calculus::Std, Calculus::Conj] {
        for i in 0..n {
            for j in 0..n {
                let word = normal_form(space, calc, Ordering::STD, &[Gen::D(i), Gen::X(j)], QScalar::one());
                let x = NCElement::gen(space, calc, Ordering::STD, Gen::X(j));
                let d = NCElement::gen(space, calc, Ordering::STD, Gen::D(i));
                let (Ok(word), Ok(x), Ok(d)) = (word, x, d) else {
                    rep.fail(format!("{calc:?} d{i} X{j}"), "normal form failed", "");
                    continue;
                };
                let lhs = word.conjugate().to_ordering(Ordering::STD);
                match x.conjugate().mul(&d.conjugate()) {
                    Ok(rhs) => rep.expect_eq(format!("{calc:?} conj(d{i} X{j})"), &lhs, &rhs.to_ordering(Ordering::STD)),
                    Err(e) => rep.fail(format!("{calc:?} conj(d{i} X{j})"), e, ""),
                }
            }
        }
    }
    if space == Space::Euclid3 {
        let d0 = NCElement::d(space, Calculus::Conj, 0);
        for a in 1..n {
            let xa = NCElement::gen(space, Calculus::Conj, Ordering::STD, Gen::X(a)).expect("coordinate");
            match (d0.mul(&xa), xa.mul(&d0)) {
                (Ok(l), Ok(r)) => rep.expect_eq(format!("dh0 X{a} = X{a} dh0"), &l, &r),
                _ => rep.fail(format!("dh0 X{a}"), "product failed", ""),
            }
        }
        rep.note(HAT_TIME_NOTE);
        rep.note(HAT_COEFF_NOTE);
    }
    rep
}

// ---------------------------------------------------------------------------
// oracle-actions
// ---------------------------------------------------------------------------

/// Counit-procedure actions agree with the closed-form representations.
pub fn action_oracle_check(space: Space, max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("oracle-actions", space.name());
    let n = space.dim();
    let cases: Vec<(ActMode, usize, CMono)> = ActMode::ALL
        .iter()
        .flat_map(|&m| (0..n).flat_map(move |i| monomials_up_to(n, max_deg).into_iter().map(move |e| (m, i, e))))
        .collect();
    let bad: Vec<(String, String, String)> = cases
        .par_iter()
        .filter_map(|&(mode, i, e)| {
            let f = mono(space, e);
            let d = action_symbol_word(space, mode, &[i]);
            let a = act_cf(&d, &f, mode).map(|x| x.to_string()).unwrap_or_else(|e| format!("error: {e}"));
            let b = act_partial_closed(space, mode, i, &f).map(|x| x.to_string()).unwrap_or_else(|e| format!("error: {e}"));
            (a != b).then(|| (format!("{} d{i} on {f}", mode.name()), a, b))
        })
        .collect();
    for (i, a, b) in bad {
        rep.fail(i, a, b);
    }
    rep
}

/// Closed-form inverse derivatives are right inverses of the derivatives.
pub fn inverse_action_check(space: Space, max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("inverse-derivatives", space.name());
    let n = space.dim();
    for mode in ActMode::ALL {
        for i in 0..n {
            for e in monomials_up_to(n, max_deg) {
                let f = mono(space, e);
                let back = act_inverse_partial(space, mode, i, &f).and_then(|g| act_partial_closed(space, mode, i, &g));
                match back {
                    Ok(b) => rep.expect_eq(format!("{} d{i} of its inverse on {f}", mode.name()), &b, &f),
                    Err(err) => rep.fail(format!("{} d{i} on {f}", mode.name()), err, ""),
                }
            }
        }
    }
    rep
}

/// At `q = 1` left actions are `∂/∂xᵢ` and right actions `−∂/∂xᵢ`.
pub fn action_classical_check(space: Space, max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("actions-classical", space.name());
    let n = space.dim();
    for mode in ActMode::ALL {
        let sign = if mode.is_left() { QScalar::one() } else { -QScalar::one() };
        for i in 0..n {
            for e in monomials_up_to(n, max_deg) {
                let f = mono(space, e);
                let got = act_cf(&action_symbol_word(space, mode, &[i]), &f, mode).and_then(|g| g.at_one());
                let want = partial(&f, i).scale(&sign).at_one();
                match (got, want) {
                    (Ok(g), Ok(w)) => rep.expect_eq(format!("{} d{i} on {f} at q=1", mode.name()), &g, &w),
                    _ => rep.fail(format!("{} d{i} on {f}", mode.name()), "evaluation at q=1 failed", ""),
                }
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// star
// ---------------------------------------------------------------------------

/// `(f ⋆ g) ⋆ h = f ⋆ (g ⋆ h)` on all monomial triples of bounded total degree.
pub fn star_associativity_check(space: Space, max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("star-associativity", space.name());
    let ms = monomials_up_to(space.dim(), max_deg);
    let mut triples = Vec::new();
    for ord in [StarOrdering::Standard, StarOrdering::Reversed] {
        for a in &ms {
            for b in &ms {
                for c in &ms {
                    if deg(a) + deg(b) + deg(c) <= max_deg {
                        triples.push((ord, *a, *b, *c));
                    }
                }
            }
        }
    }
    let bad: Vec<(String, String, String)> = triples
        .par_iter()
        .filter_map(|&(ord, a, b, c)| {
            let ctx = StarContext::new(space, ord);
            let (f, g, h) = (mono(space, a), mono(space, b), mono(space, c));
            let l = star(ctx, &star(ctx, &f, &g), &h);
            let r = star(ctx, &f, &star(ctx, &g, &h));
            (l != r).then(|| (format!("{ord:?}: ({f})({g})({h})"), l.to_string(), r.to_string()))
        })
        .collect();
    for (i, l, r) in bad {
        rep.fail(i, l, r);
    }
    rep
}

/// At `q = 1` the star product is the commutative product.
pub fn star_classical_check(space: Space, max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("star-classical", space.name());
    let ms = monomials_up_to(space.dim(), max_deg);
    for ord in [StarOrdering::Standard, StarOrdering::Reversed] {
        let ctx = StarContext::new(space, ord);
        for a in &ms {
            for b in &ms {
                if deg(a) + deg(b) > max_deg {
                    continue;
                }
                let (f, g) = (mono(space, *a), mono(space, *b));
                match (star(ctx, &f, &g).at_one(), f.mul(&g).at_one()) {
                    (Ok(l), Ok(r)) => rep.expect_eq(format!("{ord:?}: ({f}) * ({g}) at q=1"), &l, &r),
                    _ => rep.fail(format!("{ord:?}: ({f}) * ({g})"), "evaluation at q=1 failed", ""),
                }
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// hopf-taylor
// ---------------------------------------------------------------------------

/// At `q = 1` translations are `f(x + y)` and antipodes `f(−x)`.
pub fn translation_classical_check(space: Space, max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("translations-classical", space.name());
    let d = space.dim();
    for v in [HopfVariant::L, HopfVariant::LBar] {
        for m in monomials_up_to(d, max_deg) {
            let f = mono(space, m);
            let mut shifted = CFunction::one(space).with_legs(2);
            for i in 0..d {
                let s = CFunction::var(space, i).with_legs(2).add(&CFunction::var(space, i).to_second_leg().with_legs(2));
                shifted = shifted.mul(&s.pow(m[i] as u32));
            }
            match (translate(space, v, &f).at_one(), shifted.at_one()) {
                (Ok(l), Ok(r)) => rep.expect_eq(format!("{v:?} translation of {f} at q=1"), &l, &r),
                _ => rep.fail(format!("{v:?} {f}"), "evaluation at q=1 failed", ""),
            }
            let reflected = if deg(&m) % 2 == 0 { f.clone() } else { f.neg() };
            match (antipode(space, v, &f).at_one(), reflected.at_one()) {
                (Ok(l), Ok(r)) => rep.expect_eq(format!("{v:?} antipode of {f} at q=1"), &l, &r),
                _ => rep.fail(format!("{v:?} {f}"), "evaluation at q=1 failed", ""),
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// pairings
// ---------------------------------------------------------------------------

fn pairing_weight(space: Space, n: &CMono, s: i32) -> QScalar {
    match space {
        Space::Line => factorial(n[0] as u32) * qfactorial(n[1] as u32, s),
        Space::Euclid3 => {
            factorial(n[0] as u32)
                * qfactorial(n[1] as u32, 4 * s)
                * qfactorial(n[2] as u32, 2 * s)
                * qfactorial(n[3] as u32, 4 * s)
        }
    }
}

fn repeat_word(n: &CMono, order: &[usize]) -> Vec<usize> {
    order.iter().flat_map(|&i| std::iter::repeat(i).take(n[i] as usize)).collect()
}

/// Monomial pairings are diagonal with q-factorial weights.
pub fn pairing_table_check(space: Space, max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("pairings", space.name());
    let (std_word, hat_word): (Vec<usize>, Vec<usize>) = match space {
        Space::Line => (vec![0, 1], vec![0, 1]),
        Space::Euclid3 => (vec![0, 3, 2, 1], vec![0, 1, 2, 3]),
    };
    let ms = monomials_up_to(space.dim(), max_deg);
    for n in &ms {
        for m in &ms {
            let f = mono(space, *m);
            let sign = if deg(n) % 2 == 0 { QScalar::one() } else { -QScalar::one() };
            let cases = [
                (PairingVariant::LRbar, PairOrder::DerivFirst, &std_word, 1, QScalar::one()),
                (PairingVariant::LbarR, PairOrder::DerivFirst, &hat_word, -1, QScalar::one()),
                (PairingVariant::LRbar, PairOrder::CoordFirst, &std_word, 1, sign.clone()),
                (PairingVariant::LbarR, PairOrder::CoordFirst, &hat_word, -1, sign.clone()),
            ];
            for (var, ord, wo, s, sg) in cases {
                let want = if n == m { sg * pairing_weight(space, m, s) } else { QScalar::zero() };
                match pair_word(space, var, ord, &repeat_word(n, wo), &f) {
                    Ok(got) => rep.expect_eq(format!("{var:?} {ord:?} n={n:?} m={m:?}"), &got, &want),
                    Err(e) => rep.fail(format!("{var:?} {ord:?} n={n:?} m={m:?}"), e, want),
                }
            }
        }
    }
    rep
}

/// q-exponentials reproduce monomials through the pairing, and their
/// coefficients reduce at `q = 1` to `±1/∏ nᵢ!` (the sign `(−1)^n` for the
/// derivative-first exponentials).
pub fn exp_check(space: Space, max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("q-exponentials", space.name());
    for kind in ExpKind::ALL {
        let e = qexp(space, kind, max_deg);
        for m in monomials_up_to(space.dim(), max_deg) {
            let v = mono(space, m);
            match e.reconstruct(&v) {
                Ok(r) => rep.expect_eq(format!("{} reproduces {v}", kind.name()), &r, &v),
                Err(err) => rep.fail(format!("{} on {v}", kind.name()), err, v),
            }
        }
        for t in &e.terms {
            let mut want = QScalar::one();
            for &k in &t.coord {
                want = want / factorial(k as u32);
            }
            if !kind.coord_first() && deg(&t.coord) % 2 == 1 {
                want = -want;
            }
            match (t.coeff.at_one(), want.at_one()) {
                (Ok(g), Ok(w)) => rep.expect_eq(format!("{} coefficient of {:?} at q=1", kind.name(), t.coord), &g, &w),
                _ => rep.fail(format!("{} {:?}", kind.name(), t.coord), "evaluation at q=1 failed", ""),
            }
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// numeric-integrals
// ---------------------------------------------------------------------------

/// `D_{q^a} ∘ (D_{q^a})⁻¹ = id` on monomials in every variable.
pub fn jackson_inverse_check(max_deg: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("jackson-inverse", "line,euclid3");
    for space in SPACES {
        for m in monomials_up_to(space.dim(), max_deg) {
            let f = mono(space, m);
            for i in 0..space.dim() {
                for a in [1, -1, 2, -2, 4, -4] {
                    let back = jackson_d(&jackson_antiderivative(&f, i, a), i, a);
                    rep.expect_eq(format!("{space} D_(q^{a}) in x{i} on {f}"), &back, &f);
                }
            }
        }
    }
    rep
}

/// Numeric Jackson integrals over `[0, 1]` at `q₀ = 1.1`.
pub fn jackson_numeric_check(tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new("jackson-numeric", Space::Line.name());
    let q0 = 1.1;
    let cases: [(&str, fn(f64) -> f64, f64); 3] = [
        ("1", |_| 1.0, 1.0),
        ("x", |x| x, 1.0 / (1.0 + q0)),
        ("x^2", |x| x * x, 1.0 / (1.0 + q0 + q0 * q0)),
    ];
    for (name, f, want) in cases {
        let lat = LatticeFunction::from_fn(q0, 800, |x| Complex64::new(f(x), 0.0));
        match jackson_integral_numeric(&lat, 1, JacksonBound::ZeroToX, 0, 1e-15) {
            Ok(v) if (v - Complex64::new(want, 0.0)).norm() <= tol => {}
            Ok(v) => rep.fail(format!("integral of {name} over [0,1]"), v, want),
            Err(e) => rep.fail(format!("integral of {name} over [0,1]"), e, want),
        }
    }
    rep
}

fn gauss(x: f64) -> Complex64 {
    Complex64::new((-x * x).exp(), 0.0)
}

fn shifted_rational(x: f64) -> Complex64 {
    Complex64::new(x / (1.0 + x * x) + 0.5, 0.0)
}

/// Symbolic integration by parts on sample polynomials and bounds.
pub fn ibp_symbolic_suite() -> VerificationReport {
    let l = Space::Line;
    let x = |e: [u16; 2]| CFunction::monomial(l, [e[0], e[1], 0, 0, 0, 0, 0, 0], QScalar::one());
    let cases = [
        (CFunction::one(l), x([0, 1]), QScalar::ratio(1, 2), QScalar::int(3)),
        (x([0, 2]).add(&x([1, 1])), x([0, 3]).scale(&QScalar::q()), QScalar::int(-2), QScalar::q()),
        (x([1, 2]).add(&x([0, 3]).scale(&QScalar::lambda())), x([2, 1]).add(&CFunction::one(l)), QScalar::zero(), QScalar::int(1)),
    ];
    let mut rep = VerificationReport::new("integration-by-parts", l.name());
    for (f, g, a, b) in cases {
        rep.absorb(ibp_check(&f, &g, &a, &b));
    }
    rep
}

/// Whole-line integrals: the bar variants are the negatives of the others.
pub fn whole_line_check(tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new("whole-line-integrals", Space::Line.name());
    let f = LatticeFunction::from_fn(1.1, 400, |x| Complex64::new((-x * x).exp() * (1.0 + 0.3 * x), 0.2 * x * (-x * x).exp()));
    let get = |v| integrate_whole_line(&f, v, 1e-15);
    let pairs = [(IntegralVariant::L, IntegralVariant::RBar), (IntegralVariant::LBar, IntegralVariant::R)];
    for (a, b) in pairs {
        match (get(a), get(b)) {
            (Ok(x), Ok(y)) if (x + y).norm() <= tol.max(1e-12) * (1.0 + x.norm()) => {}
            (Ok(x), Ok(y)) => rep.fail(format!("{} = -{}", a.name(), b.name()), x, -y),
            (Err(e), _) | (_, Err(e)) => rep.fail(format!("{} and {}", a.name(), b.name()), e, ""),
        }
    }
    rep
}

/// Sesquilinear forms on sample lattice functions.
pub fn sesquilinear_suite(tol: f64) -> VerificationReport {
    let q0 = 1.1;
    let f = LatticeFunction::from_fn(q0, 400, |x| Complex64::new((-x * x).exp(), 0.0));
    let g = LatticeFunction::from_fn(q0, 400, |x| Complex64::new(x, 1.0) * (-x * x).exp());
    sesquilinear_report(&f, &g, tol.max(1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suites_are_rejected() {
        assert!(matches!(run_suite(&["ybe", "nope"], &SuiteOptions::default()), Err(CliError::UnknownSuite(..))));
    }

    #[test]
    fn empty_request_runs_nothing() {
        let none: [&str; 0] = [];
        assert!(run_suite(&none, &SuiteOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn ybe_gives_one_report_per_space() {
        let r = run_suite(&["ybe", "ybe"], &SuiteOptions::default()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.passed()));
        assert_eq!((r[0].space.as_str(), r[1].space.as_str()), ("line", "euclid3"));
    }

    #[test]
    fn suite_names_are_sorted() {
        let mut s = SUITES.to_vec();
        s.sort();
        assert_eq!(s, SUITES.to_vec());
    }
}
