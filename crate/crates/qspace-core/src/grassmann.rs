//! Superanalysis on the antisymmetrized braided line: Grassmann variables
//! `θ⁰, θ¹` with `(θⁱ)² = 0`, `θ⁰θ¹ = −θ¹θ⁰`, the two derivative calculi,
//! derivatives (= integrals), translations, antipodes, pairings,
//! exponentials and delta functions.
//!
//! The Leibniz rules `(∂_θ)_i θ^j = δ_i^j − R̂^{jk}_{il} θ^l (∂_θ)_k` use the
//! braided-line R-matrix (`R̂⁻¹` for the hatted calculus). Rewriting gives
//! priority to the nilpotency and anticommutation rules among θ's and among
//! derivatives; the exchange of a derivative with a θ is applied afterwards.
//! (The exchange rule alone would not annihilate `∂₁θ¹θ¹`, so the priority
//! is what makes the results well defined.)

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{QError, QResult};
use crate::evolution::IntegralVariant;
use crate::hopf::HopfVariant;
use crate::matrix::QMatrix;
use crate::ncalgebra::{ActMode, Side};
use crate::qscalar::QScalar;
use crate::report::VerificationReport;
use crate::rmatrix::build_r;
use crate::space::Space;

/// Generator codes: `θ⁰ = 0`, `θ¹ = 1`, `∂₀ = 2`, `∂₁ = 3` (hatted
/// derivatives in the hatted calculus).
pub type GWord = Vec<u8>;

const TH0: u8 = 0;
const TH1: u8 = 1;
const D0: u8 = 2;
const D1: u8 = 3;

fn is_theta(g: u8) -> bool {
    g < 2
}

/// Grassmann calculus: unhatted derivatives (`R̂`) or hatted ones (`R̂⁻¹`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GCalculus {
    Std,
    Hat,
}

/// Element of the Grassmann algebra with derivatives, normal-ordered with
/// θ's before derivatives (`CoordFirst`) or after them (`DerivFirst`);
/// within each kind index 0 precedes index 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GElement {
    pub calc: GCalculus,
    pub side: Side,
    terms: BTreeMap<GWord, QScalar>,
}

impl GElement {
    pub fn zero(calc: GCalculus, side: Side) -> Self {
        GElement { calc, side, terms: BTreeMap::new() }
    }
    pub fn add_term(&mut self, w: GWord, c: QScalar) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.remove(&w).unwrap_or_else(QScalar::zero) + c;
        if !v.is_zero() {
            self.terms.insert(w, v);
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (&GWord, &QScalar)> {
        self.terms.iter()
    }
    pub fn coeff(&self, w: &[u8]) -> QScalar {
        self.terms.get(w).cloned().unwrap_or_else(QScalar::zero)
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    /// Normal-ordered product.
    pub fn mul(&self, o: &GElement) -> GElement {
        let mut r = GElement::zero(self.calc, self.side);
        for (w1, c1) in &self.terms {
            for (w2, c2) in &o.terms {
                let mut w = w1.clone();
                w.extend(w2);
                for (m, c) in g_normal_form(self.calc, self.side, &w, c1 * c2).terms {
                    r.add_term(m, c);
                }
            }
        }
        r
    }
}

impl fmt::Display for GElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = match self.calc {
            GCalculus::Std => ["th0", "th1", "dth0", "dth1"],
            GCalculus::Hat => ["th0", "th1", "dhth0", "dhth1"],
        };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let word: Vec<&str> = w.iter().map(|&g| names[g as usize]).collect();
                match (word.is_empty(), c.is_one()) {
                    (true, _) => format!("{c}"),
                    (false, true) => word.join(" "),
                    (false, false) => format!("({c}) {}", word.join(" ")),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `R̂` of the braided line (or its inverse for the hatted calculus).
fn r_matrix(calc: GCalculus) -> QMatrix {
    let r = build_r(Space::Line).m;
    match calc {
        GCalculus::Std => r,
        GCalculus::Hat => r.inverse().expect("the R-matrix is invertible"),
    }
}

/// `R̂^{jk}_{il}`.
fn r_entry(r: &QMatrix, j: usize, k: usize, i: usize, l: usize) -> QScalar {
    r.get(j * 2 + k, i * 2 + l).clone()
}

/// Rewrites a word to normal form.
pub fn g_normal_form(calc: GCalculus, side: Side, word: &[u8], coeff: QScalar) -> GElement {
    let r = r_matrix(calc);
    let mut out = GElement::zero(calc, side);
    let mut stack: Vec<(GWord, QScalar)> = vec![(word.to_vec(), coeff)];
    while let Some((w, c)) = stack.pop() {
        if c.is_zero() {
            continue;
        }
        // nilpotency and anticommutation among generators of the same kind
        let same = (0..w.len().saturating_sub(1)).find(|&p| is_theta(w[p]) == is_theta(w[p + 1]) && w[p] >= w[p + 1]);
        if let Some(p) = same {
            if w[p] != w[p + 1] {
                let mut w2 = w.clone();
                w2.swap(p, p + 1);
                stack.push((w2, -c));
            }
            continue;
        }
        let exchange = (0..w.len().saturating_sub(1)).find(|&p| match side {
            Side::CoordFirst => !is_theta(w[p]) && is_theta(w[p + 1]),
            Side::DerivFirst => is_theta(w[p]) && !is_theta(w[p + 1]),
        });
        let Some(p) = exchange else {
            out.add_term(w, c);
            continue;
        };
        let splice = |mid: &[u8]| {
            let mut v = w[..p].to_vec();
            v.extend_from_slice(mid);
            v.extend_from_slice(&w[p + 2..]);
            v
        };
        match side {
            Side::CoordFirst => {
                // ∂_i θ^j = δ_ij − R̂^{jk}_{il} θ^l ∂_k
                let (i, j) = ((w[p] - D0) as usize, w[p + 1] as usize);
                if i == j {
                    stack.push((splice(&[]), c.clone()));
                }
                for k in 0..2 {
                    for l in 0..2 {
                        let e = r_entry(&r, j, k, i, l);
                        if !e.is_zero() {
                            stack.push((splice(&[l as u8, D0 + k as u8]), -(&c * &e)));
                        }
                    }
                }
            }
            Side::DerivFirst => {
                // θ^l ∂_k = (δ_ij − ∂_i θ^j) / R̂^{jk}_{il} for the unique (i, j)
                let (l, k) = (w[p] as usize, (w[p + 1] - D0) as usize);
                let (i, j, e) = (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| (i, j, r_entry(&r, j, k, i, l)))
                    .find(|(_, _, e)| !e.is_zero())
                    .expect("every exchange has a partner");
                let ce = &c / &e;
                if i == j {
                    stack.push((splice(&[]), ce.clone()));
                }
                stack.push((splice(&[D0 + i as u8, j as u8]), -ce));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Actions, derivatives and integrals
// ---------------------------------------------------------------------------

/// Calculus and ordering side used to evaluate an action, and the factors
/// expressing the derivative symbol through the stored generators
/// (`(∂̂_θ)₀ = −(∂_θ)₀`, `(∂̂_θ)₁ = −q(∂_θ)₁`).
fn mode_setup(mode: ActMode) -> (GCalculus, Side, [QScalar; 2]) {
    let one = || [QScalar::one(), QScalar::one()];
    match mode {
        ActMode::Left => (GCalculus::Std, Side::CoordFirst, one()),
        ActMode::LeftHat => (GCalculus::Hat, Side::CoordFirst, one()),
        // ◁ (∂̂_θ)_i, evaluated with the unhatted generators
        ActMode::Right => (GCalculus::Std, Side::DerivFirst, [-QScalar::one(), -QScalar::q()]),
        // ◁̄ (∂_θ)_i, evaluated with the hatted generators
        ActMode::RightHat => (GCalculus::Hat, Side::DerivFirst, [-QScalar::one(), -QScalar::q_pow(-1)]),
    }
}

/// θ-polynomial from `(word, coeff)` pairs (words over `0, 1`).
pub fn g_function(terms: &[(&[u8], QScalar)]) -> GElement {
    let mut r = GElement::zero(GCalculus::Std, Side::CoordFirst);
    for (w, c) in terms {
        for (m, c2) in g_normal_form(GCalculus::Std, Side::CoordFirst, w, c.clone()).terms {
            r.add_term(m, c2);
        }
    }
    r
}

/// Action of a derivative word (indices `0, 1`, in the action symbols of
/// the mode) on a θ-polynomial: `∂ ▷ f`, `∂̂ ▷̄ f`, `f ◁ ∂̂`, `f ◁̄ ∂`; the
/// counit kills the remaining derivatives.
pub fn g_act(derivs: &[usize], f: &GElement, mode: ActMode) -> QResult<GElement> {
    if f.terms.keys().any(|w| w.iter().any(|&g| !is_theta(g))) {
        return Err(QError::Impure("the function contains derivatives".into()));
    }
    if derivs.iter().any(|&i| i > 1) {
        return Err(QError::Invalid("Grassmann derivative index out of range".into()));
    }
    let (calc, side, factors) = mode_setup(mode);
    let mut out = GElement::zero(GCalculus::Std, Side::CoordFirst);
    let mut dc = QScalar::one();
    for &i in derivs {
        dc = dc * factors[i].clone();
    }
    let dw: GWord = derivs.iter().map(|&i| D0 + i as u8).collect();
    for (w, c) in &f.terms {
        let word: GWord = if mode.is_left() { [dw.clone(), w.clone()].concat() } else { [w.clone(), dw.clone()].concat() };
        for (m, c2) in g_normal_form(calc, side, &word, c * &dc).terms {
            if m.iter().all(|&g| is_theta(g)) {
                out.add_term(m, c2);
            }
        }
    }
    Ok(out)
}

/// Supernumber `f′ + f₁θ¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperNumber {
    pub body: QScalar,
    pub soul: QScalar,
}

impl SuperNumber {
    pub fn new(body: QScalar, soul: QScalar) -> Self {
        SuperNumber { body, soul }
    }
    pub fn to_element(&self) -> GElement {
        g_function(&[(&[], self.body.clone()), (&[TH1], self.soul.clone())])
    }
    /// Inverse of [`SuperNumber::to_element`]; fails outside the θ¹ subspace.
    pub fn from_element(e: &GElement) -> QResult<SuperNumber> {
        if e.terms.keys().any(|w| !(w.is_empty() || w.as_slice() == [TH1])) {
            return Err(QError::Invalid(format!("{e} is not in the θ¹ subspace")));
        }
        Ok(SuperNumber { body: e.coeff(&[]), soul: e.coeff(&[TH1]) })
    }
}

impl fmt::Display for SuperNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + ({}) th1", self.body, self.soul)
    }
}

/// `(∂_θ)₁` in the chosen action on a supernumber (a scalar, since the
/// result has no soul).
pub fn g_derivative(f: &SuperNumber, mode: ActMode) -> QResult<QScalar> {
    let r = SuperNumber::from_element(&g_act(&[1], &f.to_element(), mode)?)?;
    if !r.soul.is_zero() {
        return Err(QError::Invalid("derivative of a supernumber kept a soul".into()));
    }
    Ok(r.body)
}

/// Action realizing the integral `∫d_γθ¹`.
pub fn integral_mode(variant: IntegralVariant) -> ActMode {
    match variant {
        IntegralVariant::L => ActMode::Left,
        IntegralVariant::LBar => ActMode::LeftHat,
        IntegralVariant::R => ActMode::Right,
        IntegralVariant::RBar => ActMode::RightHat,
    }
}

/// `∫d_γθ¹ f(θ¹)`: integration equals differentiation.
pub fn g_integral(f: &SuperNumber, variant: IntegralVariant) -> QResult<QScalar> {
    g_derivative(f, integral_mode(variant))
}

// ---------------------------------------------------------------------------
// Translations and antipodes
// ---------------------------------------------------------------------------

/// `f′ + f₁θ¹ + f₁'ψ¹`: a function of two Grassmann arguments restricted to
/// the θ¹/ψ¹ subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperPair {
    pub body: QScalar,
    pub theta: QScalar,
    pub psi: QScalar,
}

/// `f(θ¹ ⊕ ψ¹) = f′ + f₁(θ¹ + ψ¹)` (both variants coincide).
pub fn g_translate(f: &SuperNumber, _variant: HopfVariant) -> SuperPair {
    SuperPair { body: f.body.clone(), theta: f.soul.clone(), psi: f.soul.clone() }
}

/// `f(⊖θ¹) = f′ − f₁θ¹` (both variants coincide).
pub fn g_antipode(f: &SuperNumber, _variant: HopfVariant) -> SuperNumber {
    SuperNumber { body: f.body.clone(), soul: -f.soul.clone() }
}

// ---------------------------------------------------------------------------
// Pairings, exponentials, delta functions
// ---------------------------------------------------------------------------

/// Pairing types of the antisymmetrized line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GPairing {
    /// `⟨f(∂_θ), g(θ)⟩_{L,R̄} = (f ▷ g)|_{θ=0}`
    DerivFirstLRbar,
    /// `⟨f(∂̂_θ), g(θ)⟩_{L̄,R} = (f ▷̄ g)|_{θ=0}`
    DerivFirstLbarR,
    /// `⟨g(θ), f(∂_θ)⟩_{L,R̄} = (g ◁̄ f)|_{∂=0}`
    CoordFirstLRbar,
    /// `⟨g(θ), f(∂̂_θ)⟩_{L̄,R} = (g ◁ f)|_{∂=0}`
    CoordFirstLbarR,
}

impl GPairing {
    pub const ALL: [GPairing; 4] =
        [GPairing::DerivFirstLRbar, GPairing::DerivFirstLbarR, GPairing::CoordFirstLRbar, GPairing::CoordFirstLbarR];
    pub fn mode(self) -> ActMode {
        match self {
            GPairing::DerivFirstLRbar => ActMode::Left,
            GPairing::DerivFirstLbarR => ActMode::LeftHat,
            GPairing::CoordFirstLRbar => ActMode::RightHat,
            GPairing::CoordFirstLbarR => ActMode::Right,
        }
    }
}

/// Pairing of a derivative word with a θ word.
pub fn g_pair(kind: GPairing, derivs: &[usize], thetas: &[u8]) -> QResult<QScalar> {
    let f = g_function(&[(thetas, QScalar::one())]);
    Ok(g_act(derivs, &f, kind.mode())?.coeff(&[]))
}

/// The four exponentials on the θ¹ subspace: `1 + c θ¹⊗(∂_θ)₁` (θ first) or
/// `1 + c (∂_θ)₁⊗θ¹` (derivative first).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GExpKind {
    /// `exp(θ¹|(∂_θ)₁)_{R̄,L}`
    ThetaDeriv,
    /// `exp(θ¹|(∂̂_θ)₁)_{R,L̄}`
    ThetaDerivHat,
    /// `exp((∂_θ)₁|θ¹)_{R̄,L}`
    DerivTheta,
    /// `exp((∂̂_θ)₁|θ¹)_{R,L̄}`
    DerivThetaHat,
}

impl GExpKind {
    pub const ALL: [GExpKind; 4] = [GExpKind::ThetaDeriv, GExpKind::ThetaDerivHat, GExpKind::DerivTheta, GExpKind::DerivThetaHat];
    fn pairing(self) -> GPairing {
        match self {
            GExpKind::ThetaDeriv => GPairing::DerivFirstLRbar,
            GExpKind::ThetaDerivHat => GPairing::DerivFirstLbarR,
            GExpKind::DerivTheta => GPairing::CoordFirstLRbar,
            GExpKind::DerivThetaHat => GPairing::CoordFirstLbarR,
        }
    }
    /// Integral variant of the delta function built from this exponential.
    pub fn delta_variant(self) -> IntegralVariant {
        match self {
            GExpKind::ThetaDeriv => IntegralVariant::L,
            GExpKind::ThetaDerivHat => IntegralVariant::LBar,
            GExpKind::DerivThetaHat => IntegralVariant::R,
            GExpKind::DerivTheta => IntegralVariant::RBar,
        }
    }
}

/// Coefficient `c` of the exponential: the dual basis of `{1, θ¹}` with
/// respect to the pairing, `c = 1/⟨(∂_θ)₁, θ¹⟩` (in the pairing's order).
pub fn g_exponential(kind: GExpKind) -> QResult<QScalar> {
    let p = g_pair(kind.pairing(), &[1], &[TH1])?;
    p.try_inv()
}

/// Delta function `δ¹_γ(η₁) = ∫d_γθ¹ exp(…)`: the exponential, read as a
/// supernumber in θ¹ with soul `c·η₁`, is integrated; returns the
/// coefficient of `η₁`.
pub fn g_delta(kind: GExpKind) -> QResult<QScalar> {
    let c = g_exponential(kind)?;
    g_integral(&SuperNumber::new(QScalar::one(), c), kind.delta_variant())
}

// ---------------------------------------------------------------------------
// Suite
// ---------------------------------------------------------------------------

/// Every identity of the antisymmetrized braided line, exactly.
pub fn grassmann_check() -> VerificationReport {
    let mut rep = VerificationReport::new("grassmann", Space::Line.name());
    let one = QScalar::one;
    let nf = |calc, w: &[u8]| g_normal_form(calc, Side::CoordFirst, w, one());
    let elem = |calc, terms: &[(&[u8], QScalar)]| {
        let mut e = GElement::zero(calc, Side::CoordFirst);
        for (w, c) in terms {
            e.add_term(w.to_vec(), c.clone());
        }
        e
    };
    // exterior relations
    rep.expect_eq("th1 th1", &nf(GCalculus::Std, &[TH1, TH1]), &GElement::zero(GCalculus::Std, Side::CoordFirst));
    rep.expect_eq("th0 th0", &nf(GCalculus::Std, &[TH0, TH0]), &GElement::zero(GCalculus::Std, Side::CoordFirst));
    rep.expect_eq("th1 th0", &nf(GCalculus::Std, &[TH1, TH0]), &elem(GCalculus::Std, &[(&[TH0, TH1], -one())]));
    rep.expect_eq("empty word", &nf(GCalculus::Std, &[]), &elem(GCalculus::Std, &[(&[], one())]));
    // Leibniz rules of both calculi
    rep.expect_eq(
        "dth1 th1",
        &nf(GCalculus::Std, &[D1, TH1]),
        &elem(GCalculus::Std, &[(&[], one()), (&[TH1, D1], -QScalar::q())]),
    );
    rep.expect_eq(
        "dhth1 th1",
        &nf(GCalculus::Hat, &[D1, TH1]),
        &elem(GCalculus::Hat, &[(&[], one()), (&[TH1, D1], -QScalar::q_pow(-1))]),
    );
    // derivatives and integrals of a generic supernumber
    let f = SuperNumber::new(QScalar::int(3), QScalar::int(5) + QScalar::q());
    for mode in ActMode::ALL {
        let want = if mode.is_left() { f.soul.clone() } else { -f.soul.clone() };
        match g_derivative(&f, mode) {
            Ok(v) => rep.expect_eq(format!("derivative {}", mode.name()), &v, &want),
            Err(e) => rep.fail(format!("derivative {}", mode.name()), e, want),
        }
        let c = SuperNumber::new(QScalar::int(7), QScalar::zero());
        match g_derivative(&c, mode) {
            Ok(v) => rep.expect_eq(format!("derivative of constant {}", mode.name()), &v, &QScalar::zero()),
            Err(e) => rep.fail(format!("derivative of constant {}", mode.name()), e, 0),
        }
    }
    for v in IntegralVariant::ALL {
        let want = if matches!(v, IntegralVariant::L | IntegralVariant::LBar) { f.soul.clone() } else { -f.soul.clone() };
        match g_integral(&f, v) {
            Ok(x) => rep.expect_eq(format!("integral {}", v.name()), &x, &want),
            Err(e) => rep.fail(format!("integral {}", v.name()), e, want),
        }
    }
    // translations and antipodes
    for var in [HopfVariant::L, HopfVariant::LBar] {
        let t = g_translate(&f, var);
        let ok = t.body == f.body && t.theta == f.soul && t.psi == f.soul;
        if !ok {
            rep.fail(format!("translation {var:?}"), format!("{t:?}"), "f' + f1 (th1 + psi1)");
        }
        let s = g_antipode(&f, var);
        rep.expect_eq(format!("antipode {var:?}"), &s, &SuperNumber::new(f.body.clone(), -f.soul.clone()));
        rep.expect_eq(format!("antipode twice {var:?}"), &g_antipode(&s, var), &f);
        // f(θ ⊕ (⊖θ)) = ε(f)
        let t = g_translate(&f, var);
        let cancel = t.theta.clone() - t.psi.clone();
        rep.expect_eq(format!("translation by the antipode {var:?}"), &cancel, &QScalar::zero());
    }
    // pairings
    let kd = |a: usize, b: usize| if a == b { one() } else { QScalar::zero() };
    for i in 0..2usize {
        for j in 0..2u8 {
            for (kind, sign) in [
                (GPairing::DerivFirstLRbar, 1),
                (GPairing::DerivFirstLbarR, 1),
                (GPairing::CoordFirstLRbar, -1),
                (GPairing::CoordFirstLbarR, -1),
            ] {
                let want = kd(i, j as usize) * QScalar::int(sign);
                let idx = format!("{kind:?} d{i} th{j}");
                match g_pair(kind, &[i], &[j]) {
                    Ok(v) => rep.expect_eq(idx, &v, &want),
                    Err(e) => rep.fail(idx, e, want),
                }
            }
        }
    }
    for (kind, d, th) in [
        (GPairing::DerivFirstLRbar, [0usize, 1], [TH1, TH0]),
        (GPairing::DerivFirstLbarR, [1, 0], [TH0, TH1]),
        (GPairing::CoordFirstLRbar, [1, 0], [TH0, TH1]),
        (GPairing::CoordFirstLbarR, [0, 1], [TH1, TH0]),
    ] {
        let idx = format!("{kind:?} {d:?} {th:?}");
        match g_pair(kind, &d, &th) {
            Ok(v) => rep.expect_eq(idx, &v, &one()),
            Err(e) => rep.fail(idx, e, 1),
        }
    }
    // exponentials and delta functions
    for kind in GExpKind::ALL {
        let want = match kind {
            GExpKind::ThetaDeriv | GExpKind::ThetaDerivHat => one(),
            GExpKind::DerivTheta | GExpKind::DerivThetaHat => -one(),
        };
        match g_exponential(kind) {
            Ok(c) => rep.expect_eq(format!("exponential {kind:?}"), &c, &want),
            Err(e) => rep.fail(format!("exponential {kind:?}"), e, want),
        }
        match g_delta(kind) {
            Ok(c) => rep.expect_eq(format!("delta {:?}", kind.delta_variant()), &c, &one()),
            Err(e) => rep.fail(format!("delta {:?}", kind.delta_variant()), e, 1),
        }
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let f = SuperNumber::new(QScalar::int(3), QScalar::int(5));
        assert_eq!(g_derivative(&f, ActMode::Left).unwrap(), QScalar::int(5));
        assert_eq!(g_derivative(&f, ActMode::Right).unwrap(), QScalar::int(-5));
        assert_eq!(g_pair(GPairing::DerivFirstLRbar, &[1], &[TH1]).unwrap(), QScalar::one());
        assert_eq!(g_pair(GPairing::CoordFirstLRbar, &[1], &[TH1]).unwrap(), -QScalar::one());
        assert_eq!(g_delta(GExpKind::ThetaDeriv).unwrap(), QScalar::one());
    }

    #[test]
    fn suite_passes() {
        let rep = grassmann_check();
        assert!(rep.passed(), "{rep:?}");
    }
}
