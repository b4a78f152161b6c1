//! Dual pairings between derivative and coordinate algebras, and the
//! q-exponentials as their canonical dual tensors.

use std::fmt;

use crate::error::{QError, QResult};
use crate::ncalgebra::{act, act_cf, action_symbol_word, ActMode, NCElement, NcMono};
use crate::qfunc::{act_partial_closed, fmt_term, join_terms, monomials_up_to, CFunction, CMono};
use crate::qscalar::{factorial, qfactorial, QScalar};
use crate::space::Space;

/// The two dual pairings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingVariant {
    /// `⟨·,·⟩_{L,R̄}`: `∂ ▷` against coordinates, coordinates `◁̄ ∂`
    LRbar,
    /// `⟨·,·⟩_{L̄,R}`: `∂̂ ▷̄` against coordinates, coordinates `◁ ∂̂`
    LbarR,
}

/// Which argument of the pairing carries the derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairOrder {
    DerivFirst,
    CoordFirst,
}

impl PairingVariant {
    /// Action realizing the pairing for the given argument order.
    pub fn mode(self, order: PairOrder) -> ActMode {
        match (self, order) {
            (PairingVariant::LRbar, PairOrder::DerivFirst) => ActMode::Left,
            (PairingVariant::LbarR, PairOrder::DerivFirst) => ActMode::LeftHat,
            (PairingVariant::LRbar, PairOrder::CoordFirst) => ActMode::RightHat,
            (PairingVariant::LbarR, PairOrder::CoordFirst) => ActMode::Right,
        }
    }
}

/// `⟨u, v⟩` computed as "act, then evaluate at the origin". `u` carries the
/// derivatives (built with the action symbols of the pairing's action, e.g.
/// [`action_symbol_word`]) and `v` the coordinates.
pub fn pair(variant: PairingVariant, order: PairOrder, u: &NCElement, v: &NCElement) -> QResult<QScalar> {
    if !u.is_pure_deriv() && !u.is_zero() {
        return Err(QError::Impure("the derivative argument of a pairing must contain derivatives only".into()));
    }
    if !v.is_pure_coord() {
        return Err(QError::Impure("the coordinate argument of a pairing must contain coordinates only".into()));
    }
    let r = act(u, v, variant.mode(order))?;
    Ok(r.coeff(&NcMono::ONE))
}

/// Pairing of derivative monomial `∂_{i₁}…∂_{iₙ}` (action symbols) with the
/// coordinate function `f` read through the ordering of the action.
pub fn pair_word(space: Space, variant: PairingVariant, order: PairOrder, word: &[usize], f: &CFunction) -> QResult<QScalar> {
    let mode = variant.mode(order);
    let d = action_symbol_word(space, mode, word);
    let r = act_cf(&d, f, mode)?;
    Ok(r.coeff(&[0; 8]))
}

/// The four q-exponentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpKind {
    /// `exp(x|∂)_{R̄,L}`
    CoordDeriv,
    /// `exp(x|∂̂)_{R,L̄}`
    CoordDerivHat,
    /// `exp(∂|x)_{R̄,L}`
    DerivCoord,
    /// `exp(∂̂|x)_{R,L̄}`
    DerivCoordHat,
}

impl ExpKind {
    pub const ALL: [ExpKind; 4] = [ExpKind::CoordDeriv, ExpKind::CoordDerivHat, ExpKind::DerivCoord, ExpKind::DerivCoordHat];
    /// True for the hatted (`R, L̄`) exponentials, whose coordinate leg is read
    /// in reversed ordering.
    pub fn is_hat(self) -> bool {
        matches!(self, ExpKind::CoordDerivHat | ExpKind::DerivCoordHat)
    }
    /// Whether the coordinate leg stands first in the tensor.
    pub fn coord_first(self) -> bool {
        matches!(self, ExpKind::CoordDeriv | ExpKind::CoordDerivHat)
    }
    /// Action under which the derivative leg is dual to the coordinate leg.
    pub fn mode(self) -> ActMode {
        match self {
            ExpKind::CoordDeriv => ActMode::Left,
            ExpKind::CoordDerivHat => ActMode::LeftHat,
            ExpKind::DerivCoord => ActMode::RightHat,
            ExpKind::DerivCoordHat => ActMode::Right,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            ExpKind::CoordDeriv => "exp(x|d)",
            ExpKind::CoordDerivHat => "exp(x|dh)",
            ExpKind::DerivCoord => "exp(d|x)",
            ExpKind::DerivCoordHat => "exp(dh|x)",
        }
    }
    pub fn parse(s: &str) -> Option<ExpKind> {
        match s {
            "x|d" | "coord-deriv" => Some(ExpKind::CoordDeriv),
            "x|dh" | "coord-deriv-hat" => Some(ExpKind::CoordDerivHat),
            "d|x" | "deriv-coord" => Some(ExpKind::DerivCoord),
            "dh|x" | "deriv-coord-hat" => Some(ExpKind::DerivCoordHat),
            _ => None,
        }
    }
}

/// One term `coeff · e ⊗ f` of an exponential: a coordinate monomial (read
/// through W, or W̃ for the hatted kinds) and a derivative word of action
/// symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpTerm {
    pub coord: CMono,
    pub derivs: Vec<usize>,
    pub coeff: QScalar,
}

/// A q-exponential truncated at total degree `degree_bound` (complete through
/// that degree).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorSeries {
    pub space: Space,
    pub kind: ExpKind,
    pub degree_bound: u32,
    pub terms: Vec<ExpTerm>,
}

/// Factorial weight `n₀! [[n₊]]_{q^{4s}}! [[n₃]]_{q^{2s}}! [[n₋]]_{q^{4s}}!`
/// (3D) or `n₀! [[n₁]]_{q^s}!` (line) for `s = ±1`.
fn weight(space: Space, n: &CMono, s: i32) -> QScalar {
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

fn word(space: Space, n: &CMono, order: &[usize]) -> Vec<usize> {
    let mut w = Vec::new();
    for &i in order.iter().take(space.dim()) {
        for _ in 0..n[i] {
            w.push(i);
        }
    }
    w
}

/// The tabulated coordinate-first exponentials.
fn coord_first_series(space: Space, hat: bool, degree: u32) -> Vec<ExpTerm> {
    let (s, order): (i32, [usize; 4]) = match (space, hat) {
        (Space::Line, false) => (1, [0, 1, 0, 0]),
        (Space::Line, true) => (-1, [0, 1, 0, 0]),
        // (∂₀)(∂₋)(∂₃)(∂₊) against x⁰x⁺x³x⁻
        (Space::Euclid3, false) => (1, [0, 3, 2, 1]),
        // (∂̂₀)(∂̂₊)(∂̂₃)(∂̂₋) against x⁰x⁻x³x⁺
        (Space::Euclid3, true) => (-1, [0, 1, 2, 3]),
    };
    monomials_up_to(space.dim(), degree)
        .into_iter()
        .map(|n| ExpTerm { coord: n, derivs: word(space, &n, &order), coeff: weight(space, &n, s).inv() })
        .collect()
}

/// Substitution `Xⁱ ↔ −∂ᵢ`, `∂ᵢ ↔ Xⁱ` together with `+ ↔ −`, mapping a
/// coordinate-first exponential to its derivative-first twin: the old
/// coordinate monomial (in its positional order) becomes the negated
/// derivative word, the old derivative word becomes the coordinate monomial.
fn dualize(space: Space, hat: bool, terms: Vec<ExpTerm>) -> Vec<ExpTerm> {
    let bar = |i: usize| crate::qfunc::bar_index(space, i);
    terms
        .into_iter()
        .map(|t| {
            let mut coord = [0u16; 8];
            for &i in &t.derivs {
                coord[bar(i)] += 1;
            }
            let mut derivs = Vec::new();
            for i in coord_positions(space, hat) {
                for _ in 0..t.coord[i] {
                    derivs.push(bar(i));
                }
            }
            let sign = if derivs.len() % 2 == 0 { QScalar::one() } else { -QScalar::one() };
            ExpTerm { coord, derivs, coeff: &t.coeff * &sign }
        })
        .collect()
}

/// Positional order of the coordinate variables in W (standard) or W̃.
fn coord_positions(space: Space, reversed: bool) -> Vec<usize> {
    match (space, reversed) {
        (Space::Line, _) => vec![0, 1],
        (Space::Euclid3, false) => vec![0, 1, 2, 3],
        (Space::Euclid3, true) => vec![0, 3, 2, 1],
    }
}

/// The q-exponential of the given kind truncated at total degree `degree_bound`.
pub fn qexp(space: Space, kind: ExpKind, degree_bound: u32) -> TensorSeries {
    let terms = match kind {
        ExpKind::CoordDeriv => coord_first_series(space, false, degree_bound),
        ExpKind::CoordDerivHat => coord_first_series(space, true, degree_bound),
        ExpKind::DerivCoord => dualize(space, false, coord_first_series(space, false, degree_bound)),
        ExpKind::DerivCoordHat => dualize(space, true, coord_first_series(space, true, degree_bound)),
    };
    TensorSeries { space, kind, degree_bound, terms }
}

impl TensorSeries {
    /// The derivative leg of term `k` as an element in the units of the
    /// exponential's action.
    pub fn deriv_element(&self, k: usize) -> NCElement {
        action_symbol_word(self.space, self.kind.mode(), &self.terms[k].derivs)
    }
    /// Applies the derivative leg to `v` and evaluates at the origin, then
    /// multiplies back the coordinate leg: reconstructs `v` exactly when the
    /// two legs are dual bases and the truncation covers `v`'s degree.
    pub fn reconstruct(&self, v: &CFunction) -> QResult<CFunction> {
        if v.total_degree() > self.degree_bound {
            return Err(QError::Invalid(format!(
                "exponential truncated at degree {} cannot reconstruct degree {}",
                self.degree_bound,
                v.total_degree()
            )));
        }
        let mode = self.kind.mode();
        let mut out = CFunction::zero(self.space);
        for t in &self.terms {
            let mut g = v.clone();
            if mode.is_left() {
                for &i in t.derivs.iter().rev() {
                    g = act_partial_closed(self.space, mode, i, &g)?;
                }
            } else {
                for &i in &t.derivs {
                    g = act_partial_closed(self.space, mode, i, &g)?;
                }
            }
            let c = g.coeff(&[0; 8]);
            if !c.is_zero() {
                out.add_term(t.coord, &c * &t.coeff);
            }
        }
        Ok(out)
    }
}

impl fmt::Display for TensorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = CFunction::var_names(self.space);
        let dn: &[&str] = match self.space {
            Space::Line => &["d0", "d1"],
            Space::Euclid3 => &["d0", "dp", "d3", "dm"],
        };
        let hat = if self.kind.is_hat() { "h" } else { "" };
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut xs = Vec::new();
                for &i in &coord_positions(self.space, self.kind.is_hat()) {
                    match t.coord[i] {
                        0 => {}
                        1 => xs.push(names[i].to_string()),
                        k => xs.push(format!("{}^{}", names[i], k)),
                    }
                }
                let ds: Vec<String> = t.derivs.iter().map(|&i| dn[i].replacen('d', &format!("d{hat}"), 1)).collect();
                let x = if xs.is_empty() { "1".to_string() } else { xs.join(" ") };
                let d = if ds.is_empty() { "1".to_string() } else { ds.join(" ") };
                let body = if self.kind.coord_first() { format!("{x} (x) {d}") } else { format!("{d} (x) {x}") };
                fmt_term(&t.coeff, &body)
            })
            .collect();
        write!(f, "{}", join_terms(parts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalgebra::{Calculus, Ordering};

    #[test]
    fn pairing_examples() {
        let l = Space::Line;
        let x1sq = CFunction::monomial(l, [0, 2, 0, 0, 0, 0, 0, 0], QScalar::one());
        let v = pair_word(l, PairingVariant::LRbar, PairOrder::DerivFirst, &[1, 1], &x1sq).unwrap();
        assert_eq!(v, QScalar::one() + QScalar::q());
        let one = NCElement::one(l, Calculus::Std, Ordering::STD);
        assert_eq!(pair(PairingVariant::LRbar, PairOrder::DerivFirst, &one, &one).unwrap(), QScalar::one());
        let x1 = CFunction::var(l, 1);
        let v = pair_word(l, PairingVariant::LRbar, PairOrder::CoordFirst, &[1], &x1).unwrap();
        assert_eq!(v, -QScalar::one());
    }

    #[test]
    fn exponential_examples() {
        let l = Space::Line;
        let e = qexp(l, ExpKind::CoordDeriv, 1);
        assert_eq!(e.terms.len(), 3);
        assert!(e.terms.iter().all(|t| t.coeff.is_one()));
        let e = qexp(l, ExpKind::CoordDeriv, 2);
        let t = e.terms.iter().find(|t| t.coord[1] == 2).unwrap();
        assert_eq!(t.coeff, (QScalar::one() + QScalar::q()).inv());
        assert_eq!(t.derivs, vec![1, 1]);
        let e = qexp(Space::Euclid3, ExpKind::CoordDeriv, 0);
        assert_eq!(e.terms.len(), 1);
        assert_eq!(e.to_string(), "1 (x) 1");
    }
}
