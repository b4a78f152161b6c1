//! Time evolution: truncated evolution operators `exp(∓iHt)`, the
//! Schrödinger equations of the operators and of wave functions, composition
//! and inversion laws, Dyson series, Heisenberg equations of motion,
//! whole-space q-integrals, integration by parts and sesquilinear forms.
//!
//! The time `t` has trivial braiding, so series are polynomials in a
//! commutative symbol `t` with [`NCElement`] coefficients.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{QError, QResult};
use crate::ncalgebra::{act, ActMode, Calculus, NCElement, NcMono, Ordering};
use crate::qfunc::{
    act_partial_closed, antiderivative, jackson_antiderivative, jackson_integral_numeric, scale_arg, CFunction,
    JacksonBound, LatticeFunction,
};
use crate::qscalar::{factorial, QScalar};
use crate::report::VerificationReport;
use crate::rmatrix::standard_metric;
use crate::space::Space;

// ---------------------------------------------------------------------------
// Series and Hamiltonians
// ---------------------------------------------------------------------------

/// Polynomial `Σ tⁿ coeffs[n]` in the time symbol, truncated after `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSeries {
    pub coeffs: Vec<NCElement>,
    pub order: usize,
}

impl OperatorSeries {
    /// Constant series `e`.
    pub fn constant(e: NCElement, order: usize) -> Self {
        let zero = NCElement::zero(e.space, e.calc, e.ord);
        let mut coeffs = vec![zero; order + 1];
        coeffs[0] = e;
        OperatorSeries { coeffs, order }
    }
    pub fn coeff(&self, n: usize) -> &NCElement {
        &self.coeffs[n]
    }
    /// Truncated product (the time symbol is central).
    pub fn mul(&self, o: &OperatorSeries) -> QResult<OperatorSeries> {
        let order = self.order.min(o.order);
        let c0 = &self.coeffs[0];
        let mut coeffs = vec![NCElement::zero(c0.space, c0.calc, c0.ord); order + 1];
        for i in 0..=order {
            for j in 0..=order - i {
                coeffs[i + j] = coeffs[i + j].add(&self.coeffs[i].mul(&o.coeffs[j])?)?;
            }
        }
        Ok(OperatorSeries { coeffs, order })
    }
    /// Series with every coefficient multiplied from the left by `e`.
    pub fn left_mul(&self, e: &NCElement) -> QResult<OperatorSeries> {
        let coeffs = self.coeffs.iter().map(|c| e.mul(c)).collect::<QResult<_>>()?;
        Ok(OperatorSeries { coeffs, order: self.order })
    }
    /// Series with every coefficient multiplied from the right by `e`.
    pub fn right_mul(&self, e: &NCElement) -> QResult<OperatorSeries> {
        let coeffs = self.coeffs.iter().map(|c| c.mul(e)).collect::<QResult<_>>()?;
        Ok(OperatorSeries { coeffs, order: self.order })
    }
    /// `1` through the truncation order.
    pub fn is_identity(&self) -> bool {
        let c0 = &self.coeffs[0];
        *c0 == NCElement::one(c0.space, c0.calc, c0.ord) && self.coeffs[1..].iter().all(|c| c.is_zero())
    }
    /// Coefficients evaluated at `q = 1`.
    pub fn at_one(&self) -> QResult<OperatorSeries> {
        let coeffs = self.coeffs.iter().map(element_at_one).collect::<QResult<_>>()?;
        Ok(OperatorSeries { coeffs, order: self.order })
    }
}

impl fmt::Display for OperatorSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            parts.push(match n {
                0 => format!("({c})"),
                1 => format!("t ({c})"),
                _ => format!("t^{n} ({c})"),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{} + O(t^{})", parts.join(" + "), self.order + 1)
        }
    }
}

/// Element with every coefficient evaluated at `q = 1`.
pub fn element_at_one(e: &NCElement) -> QResult<NCElement> {
    let mut r = NCElement::zero(e.space, e.calc, e.ord);
    for (m, c) in e.terms() {
        r.add_term(*m, QScalar::gauss(c.at_one()?));
    }
    Ok(r)
}

/// A Hamiltonian acting on the spatial coordinates only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hamiltonian {
    pub op: NCElement,
    pub hermitian: bool,
}

impl Hamiltonian {
    /// Validates that `op` is free of time generators and `Λ`; when
    /// `hermitian` is set, checks that the conjugate equals `op` once the
    /// derivatives of the conjugate calculus are identified with the
    /// standard ones (both calculi share the derivative relations).
    pub fn new(op: NCElement, hermitian: bool) -> QResult<Self> {
        if !op.is_spatial() || op.has_lambda() {
            return Err(QError::Impure("a Hamiltonian may contain neither time generators nor scaling operators".into()));
        }
        if hermitian && !is_hermitian(&op) {
            return Err(QError::Invalid(format!("{op} is not Hermitian")));
        }
        Ok(Hamiltonian { op, hermitian })
    }
    /// `−½ ∂₁∂₁` on the line and `−½ g^{AB} ∂_A ∂_B` in three dimensions.
    pub fn free(space: Space) -> Self {
        let half = QScalar::ratio(-1, 2);
        let op = match space {
            Space::Line => NCElement::d(space, Calculus::Std, 1).pow(2).unwrap().scale(&half),
            Space::Euclid3 => {
                let g = standard_metric().upper;
                let mut acc = NCElement::zero(space, Calculus::Std, Ordering::STD);
                for a in 1..4 {
                    for b in 1..4 {
                        let c = g.get(a - 1, b - 1);
                        if !c.is_zero() {
                            let t = NCElement::d(space, Calculus::Std, a).mul(&NCElement::d(space, Calculus::Std, b)).unwrap();
                            acc = acc.add(&t.scale(c)).unwrap();
                        }
                    }
                }
                acc.scale(&half)
            }
        };
        Hamiltonian::new(op, true).expect("the free Hamiltonian is Hermitian")
    }
    pub fn zero(space: Space) -> Self {
        Hamiltonian { op: NCElement::zero(space, Calculus::Std, Ordering::STD), hermitian: true }
    }
    pub fn space(&self) -> Space {
        self.op.space
    }
}

/// Conjugate of `e`, re-expressed in `e`'s calculus under the identification
/// of the derivative generators.
fn dagger(e: &NCElement) -> NCElement {
    e.conjugate().retag(e.calc).to_ordering(e.ord)
}

fn is_hermitian(op: &NCElement) -> bool {
    dagger(op) == *op
}

/// `exp(−iHt)` (forward, `U(t, 0)`) or `exp(iHt)` (inverse, `U⁻¹(t, 0)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Inverse,
}

impl Direction {
    /// `∓i`
    fn unit(self) -> QScalar {
        match self {
            Direction::Forward => -QScalar::i(),
            Direction::Inverse => QScalar::i(),
        }
    }
}

/// Truncated evolution operator: `coeff[n] = (∓i)ⁿ Hⁿ / n!`.
pub fn build_u(h: &Hamiltonian, order: usize, dir: Direction) -> OperatorSeries {
    let mut series = OperatorSeries::constant(NCElement::one(h.space(), h.op.calc, h.op.ord), order);
    for n in 1..=order {
        let c = h.op.mul(&series.coeffs[n - 1]).expect("same space").scale(&(dir.unit() / QScalar::int(n as i64)));
        series.coeffs[n] = c;
    }
    series
}

// ---------------------------------------------------------------------------
// Schrödinger equations
// ---------------------------------------------------------------------------

/// Factor `c` in `∂₀ ⋄ tⁿ = c tⁿ⁻¹` for the time derivative of an action
/// mode, read off from the kernel's closed-form representation.
pub fn time_derivative_factor(space: Space, mode: ActMode, n: u16) -> QResult<QScalar> {
    let mut e = [0u16; 8];
    e[0] = n;
    let r = act_partial_closed(space, mode, 0, &CFunction::monomial(space, e, QScalar::one()))?;
    let mut e1 = [0u16; 8];
    e1[0] = n.saturating_sub(1);
    let c = r.coeff(&e1);
    if r.sub(&CFunction::monomial(space, e1, c.clone())).is_zero() {
        Ok(c)
    } else {
        Err(QError::Invalid(format!("the {} time derivative does not lower the power of t", mode.name())))
    }
}

/// Residual check of the Schrödinger equation of an evolution operator:
/// left modes `i∂₀ ▷ U = HU`, right modes `U ◁ (i∂₀) = UH`, term by term
/// through `order − 1`.
pub fn schrodinger_residual(u: &OperatorSeries, h: &Hamiltonian, mode: ActMode) -> VerificationReport {
    let space = h.space();
    let mut rep = VerificationReport::new(format!("schrodinger-{}", mode.name()), space.name());
    for n in 0..u.order {
        let f = match time_derivative_factor(space, mode, (n + 1) as u16) {
            Ok(f) => f,
            Err(e) => {
                rep.fail(format!("t^{n}"), e.to_string(), "");
                return rep;
            }
        };
        let lhs = u.coeffs[n + 1].scale(&(QScalar::i() * f));
        let rhs = if mode.is_left() { h.op.mul(&u.coeffs[n]) } else { u.coeffs[n].mul(&h.op) }.expect("same space");
        rep.expect_eq(format!("t^{n}"), &lhs, &rhs);
    }
    rep
}

/// Evolution operator belonging to an action mode: `exp(−iHt)` for the left
/// family and `exp(iHt)` for the right family.
pub fn u_for_mode(h: &Hamiltonian, order: usize, mode: ActMode) -> OperatorSeries {
    build_u(h, order, if mode.is_left() { Direction::Forward } else { Direction::Inverse })
}

/// Both Schrödinger families for all four actions.
pub fn schrodinger_check(h: &Hamiltonian, order: usize) -> VerificationReport {
    let mut rep = VerificationReport::new("schrodinger", h.space().name());
    for mode in ActMode::ALL {
        rep.absorb(schrodinger_residual(&u_for_mode(h, order, mode), h, mode));
    }
    rep
}

/// Schrödinger picture: `φ(t) = U(t) ▷ φ₀` solves `i∂₀ ▷ φ = H ▷ φ` and
/// `φ(t) = φ₀ ◁ U(t)` solves `φ ◁ (i∂̂₀) = φ ◁ H` through `order − 1`.
/// Needs a Hamiltonian built from derivatives only.
pub fn schrodinger_picture_check(h: &Hamiltonian, phi0: &CFunction, order: usize) -> VerificationReport {
    let space = h.space();
    let mut rep = VerificationReport::new("schrodinger-picture", space.name());
    if !h.op.is_pure_deriv() {
        rep.fail("H", "Hamiltonian with coordinates", "derivatives only");
        return rep;
    }
    let phi = NCElement::from_cfunction(phi0, Calculus::Std, Ordering::STD);
    for mode in [ActMode::Left, ActMode::Right] {
        let mut run = || -> QResult<()> {
            let u = u_for_mode(h, order, mode);
            let waves: Vec<CFunction> = u
                .coeffs
                .iter()
                .map(|c| act(c, &phi, mode).and_then(|r| r.to_ordering(Ordering::STD).to_cfunction()))
                .collect::<QResult<_>>()?;
            for n in 0..order {
                let f = time_derivative_factor(space, mode, (n + 1) as u16)?;
                let lhs = waves[n + 1].scale(&(QScalar::i() * f));
                let wn = NCElement::from_cfunction(&waves[n], Calculus::Std, Ordering::STD);
                let rhs = act(&h.op, &wn, mode)?.to_ordering(Ordering::STD).to_cfunction()?;
                rep.expect_eq(format!("{} t^{n}", mode.name()), &lhs, &rhs);
            }
            Ok(())
        };
        if let Err(e) = run() {
            rep.fail(mode.name(), e.to_string(), "");
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Several time symbols: composition, inversion, Dyson series
// ---------------------------------------------------------------------------

/// Polynomial in up to three commuting time symbols `(t, t′, t″)` with
/// operator coefficients, truncated at total degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct TimePoly {
    terms: BTreeMap<[u32; 3], NCElement>,
    order: u32,
}

impl TimePoly {
    fn zero(order: u32) -> Self {
        TimePoly { terms: BTreeMap::new(), order }
    }
    fn one(h: &NCElement, order: u32) -> Self {
        let mut p = TimePoly::zero(order);
        p.add_term([0; 3], NCElement::one(h.space, h.calc, h.ord));
        p
    }
    fn add_term(&mut self, e: [u32; 3], c: NCElement) {
        if e.iter().sum::<u32>() > self.order || c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&e) {
            Some(v) => v.add(&c).expect("same space"),
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }
    fn add(&self, o: &TimePoly) -> TimePoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }
    fn mul(&self, o: &TimePoly) -> TimePoly {
        let mut r = TimePoly::zero(self.order.min(o.order));
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = [e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]];
                if e.iter().sum::<u32>() <= r.order {
                    r.add_term(e, c1.mul(c2).expect("same space"));
                }
            }
        }
        r
    }
    /// `∫_{t′}^{t} ds p(s, t′)` where `p` is expressed in the symbols
    /// `(s, t′)` stored in slots `(0, 1)`.
    fn integrate_from_t1(&self) -> TimePoly {
        let mut r = TimePoly::zero(self.order);
        for (e, c) in &self.terms {
            let c = c.scale(&QScalar::ratio(1, e[0] as i64 + 1));
            r.add_term([e[0] + 1, e[1], e[2]], c.clone());
            r.add_term([0, e[1] + e[0] + 1, e[2]], c.neg());
        }
        r
    }
}

impl fmt::Display for TimePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["t", "t'", "t''"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mono: Vec<String> = (0..3)
                    .filter(|&i| e[i] > 0)
                    .map(|i| if e[i] == 1 { names[i].to_string() } else { format!("{}^{}", names[i], e[i]) })
                    .collect();
                if mono.is_empty() {
                    format!("({c})")
                } else {
                    format!("{} ({c})", mono.join(" "))
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, j| acc * (n - j) as i64 / (j + 1) as i64)
}

/// `exp(c·iH (t_a − t_b))` with `c = ∓1` from the direction; `b = None`
/// means `t_b = 0`.
fn exp_between(h: &Hamiltonian, a: usize, b: Option<usize>, order: u32, dir: Direction) -> TimePoly {
    let u = build_u(h, order as usize, dir);
    let mut p = TimePoly::zero(order);
    for (n, c) in u.coeffs.iter().enumerate() {
        let n = n as u32;
        match b {
            None => {
                let mut e = [0; 3];
                e[a] = n;
                p.add_term(e, c.clone());
            }
            Some(b) => {
                for k in 0..=n {
                    let mut e = [0; 3];
                    e[a] += k;
                    e[b] += n - k;
                    let sign = if (n - k) % 2 == 0 { 1 } else { -1 };
                    p.add_term(e, c.scale(&QScalar::int(sign * binomial(n, k))));
                }
            }
        }
    }
    p
}

/// Composition and inversion laws of both operator families with generic
/// time symbols `t, t′, t″`, exact through `order`.
pub fn compose_check(h: &Hamiltonian, order: u32) -> VerificationReport {
    use Direction::{Forward, Inverse};
    let (t, t1, t2) = (0usize, 1usize, 2usize);
    let mut rep = VerificationReport::new("evolution-composition", h.space().name());
    let one = TimePoly::one(&h.op, order);
    // α: U(t,t′) = U(t,0)U⁻¹(t′,0) = exp(−iH(t−t′))
    let ua = |a, b| exp_between(h, a, Some(b), order, Forward);
    let def_a = exp_between(h, t, None, order, Forward).mul(&exp_between(h, t1, None, order, Inverse));
    rep.expect_eq("U_a(t,t') = U_a(t,0) U_a^-1(t',0)", &def_a, &ua(t, t1));
    rep.expect_eq("U_a(t,t'') U_a(t'',t') = U_a(t,t')", &ua(t, t2).mul(&ua(t2, t1)), &ua(t, t1));
    rep.expect_eq("U_a(t,t') U_a(t',t) = 1", &ua(t, t1).mul(&ua(t1, t)), &one);
    // U⁻¹(t,t′) = exp((t−t′) iH) equals U(t′,t)
    rep.expect_eq("U_a^-1(t,t') = U_a(t',t)", &exp_between(h, t, Some(t1), order, Inverse), &ua(t1, t));
    // β: U_β(t,t′) = U_β⁻¹(t′,0)U_β(t,0) = exp(iH(t−t′))
    let ub = |a, b| exp_between(h, a, Some(b), order, Inverse);
    let def_b = exp_between(h, t1, None, order, Forward).mul(&exp_between(h, t, None, order, Inverse));
    rep.expect_eq("U_b(t,t') = U_b^-1(t',0) U_b(t,0)", &def_b, &ub(t, t1));
    rep.expect_eq("U_b(t'',t') U_b(t,t'') = U_b(t,t')", &ub(t2, t1).mul(&ub(t, t2)), &ub(t, t1));
    rep.expect_eq("U_b(t,t') U_b(t',t) = 1", &ub(t, t1).mul(&ub(t1, t)), &one);
    // t″ = t′ degenerates to the identity factor
    rep.expect_eq("U_a(t',t') = 1", &ua(t1, t1), &one);
    rep
}

/// Iterated time-ordered integrals and the integral equations reproduce the
/// exponential series of both families through `order` (time-independent H).
pub fn dyson_check(h: &Hamiltonian, order: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("evolution-dyson", h.space().name());
    let one = TimePoly::one(&h.op, order);
    let i = QScalar::i();
    for (name, dir, unit) in [("alpha", Direction::Forward, i.inv()), ("beta", Direction::Inverse, i.clone())] {
        let target = exp_between(h, 0, Some(1), order, dir);
        // Σ i^{∓n} ∫_{t′}^{t}dt₁ … ∫_{t′}^{t_{n−1}}dt_n H…H
        let mut dyson = one.clone();
        let mut nested = one.clone();
        let mut hn = NCElement::one(h.space(), h.op.calc, h.op.ord);
        for n in 1..=order {
            nested = nested.integrate_from_t1();
            hn = hn.mul(&h.op).expect("same space");
            let coeff = unit.pow(n as i32);
            let mut term = TimePoly::zero(order);
            for (e, c) in &nested.terms {
                term.add_term(*e, hn.mul(c).expect("same space").scale(&coeff));
            }
            dyson = dyson.add(&term);
        }
        rep.expect_eq(format!("{name} iterated integrals"), &dyson, &target);
        // U = 1 ∓ i ∫_{t′}^{t} H U   (α)   and   U = 1 + i ∫_{t′}^{t} U H   (β)
        let mut integrand = TimePoly::zero(order);
        for (e, c) in &target.terms {
            let v = match dir {
                Direction::Forward => h.op.mul(c).expect("same space").scale(&-i.clone()),
                Direction::Inverse => c.mul(&h.op).expect("same space").scale(&i),
            };
            integrand.add_term(*e, v);
        }
        let rhs = one.add(&integrand.integrate_from_t1());
        rep.expect_eq(format!("{name} integral equation"), &rhs, &target);
    }
    rep
}

/// `U†U = UU† = 1` through the truncation order for a Hermitian Hamiltonian.
pub fn unitarity_check(h: &Hamiltonian, order: usize) -> VerificationReport {
    let mut rep = VerificationReport::new("evolution-unitarity", h.space().name());
    if !h.hermitian {
        rep.fail("H", "not flagged Hermitian", "Hermitian");
        return rep;
    }
    let u = build_u(h, order, Direction::Forward);
    let ud = OperatorSeries { coeffs: u.coeffs.iter().map(dagger).collect(), order };
    rep.expect_eq("U^dagger", &ud, &build_u(h, order, Direction::Inverse));
    for (name, p) in [("U^dagger U", ud.mul(&u)), ("U U^dagger", u.mul(&ud))] {
        match p {
            Ok(p) if p.is_identity() => {}
            Ok(p) => rep.fail(name, p, "1"),
            Err(e) => rep.fail(name, e, "1"),
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Heisenberg picture
// ---------------------------------------------------------------------------

/// Which conjugation defines the Heisenberg operator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Picture {
    /// `O_H = U⁻¹ O U`, `dO_H/dt = i[H, O_H]`
    Unprimed,
    /// `O′_H = U O U⁻¹`, `dO′_H/dt = i[O′_H, H]`
    Primed,
}

/// Series of the Heisenberg operator.
pub fn heisenberg_evolve(o: &NCElement, h: &Hamiltonian, order: usize, picture: Picture) -> QResult<OperatorSeries> {
    if !o.is_spatial() {
        return Err(QError::Impure("observables must be free of time generators".into()));
    }
    let u = build_u(h, order, Direction::Forward);
    let uinv = build_u(h, order, Direction::Inverse);
    let (a, b) = match picture {
        Picture::Unprimed => (uinv, u),
        Picture::Primed => (u, uinv),
    };
    a.right_mul(o)?.mul(&b)
}

/// Equation of motion of the Heisenberg operator through `order − 1`.
pub fn heisenberg_check(o: &NCElement, h: &Hamiltonian, order: usize) -> VerificationReport {
    let mut rep = VerificationReport::new("heisenberg", h.space().name());
    for picture in [Picture::Unprimed, Picture::Primed] {
        let s = match heisenberg_evolve(o, h, order, picture) {
            Ok(s) => s,
            Err(e) => {
                rep.fail(format!("{picture:?}"), e, "");
                continue;
            }
        };
        for n in 0..order {
            let lhs = s.coeffs[n + 1].scale(&QScalar::int(n as i64 + 1));
            let hs = h.op.mul(&s.coeffs[n]).unwrap();
            let sh = s.coeffs[n].mul(&h.op).unwrap();
            let comm = match picture {
                Picture::Unprimed => hs.sub(&sh),
                Picture::Primed => sh.sub(&hs),
            }
            .unwrap();
            rep.expect_eq(format!("{picture:?} t^{n}"), &lhs, &comm.scale(&QScalar::i()));
        }
    }
    rep
}

/// Classical (`q = 1`) Weyl algebra with the same monomial layout as the
/// kernel: coordinates before derivatives, `∂_A X^B = δ_A^B + X^B ∂_A`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Weyl {
    space: Space,
    terms: BTreeMap<NcMono, QScalar>,
}

impl Weyl {
    fn from_element(e: &NCElement) -> QResult<Weyl> {
        let e = element_at_one(&e.to_ordering(Ordering::STD))?;
        if e.has_lambda() {
            return Err(QError::Impure("scaling operators have no classical counterpart here".into()));
        }
        Ok(Weyl { space: e.space, terms: e.terms().map(|(m, c)| (*m, c.clone())).collect() })
    }
    fn add_term(&mut self, m: NcMono, c: QScalar) {
        let v = self.terms.remove(&m).unwrap_or_else(QScalar::zero) + c;
        if !v.is_zero() {
            self.terms.insert(m, v);
        }
    }
    fn mul(&self, o: &Weyl) -> Weyl {
        let d = self.space.dim();
        let mut r = Weyl { space: self.space, terms: BTreeMap::new() };
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                // contractions k_i between ∂_i of m1 and X^i of m2
                let mut ks = vec![[0u16; 8]];
                for i in 0..d {
                    let kmax = m1.word[d + i].min(m2.word[i]);
                    ks = ks
                        .into_iter()
                        .flat_map(|k| {
                            (0..=kmax).map(move |j| {
                                let mut k2 = k;
                                k2[i] = j;
                                k2
                            })
                        })
                        .collect();
                }
                for k in ks {
                    let mut c = c1 * c2;
                    let mut w = [0u16; 8];
                    for i in 0..d {
                        let (b, cc, kk) = (m1.word[d + i] as u32, m2.word[i] as u32, k[i] as u32);
                        c = c * QScalar::int(binomial(b, kk)) * factorial(cc) / factorial(cc - kk);
                        w[i] = m1.word[i] + m2.word[i] - k[i];
                        w[d + i] = m1.word[d + i] + m2.word[d + i] - k[i];
                    }
                    r.add_term(NcMono { word: w, lam: 0 }, c);
                }
            }
        }
        r
    }
    fn sub(&self, o: &Weyl) -> Weyl {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, -c.clone());
        }
        r
    }
    fn scale(&self, s: &QScalar) -> Weyl {
        let mut r = Weyl { space: self.space, terms: BTreeMap::new() };
        for (m, c) in &self.terms {
            r.add_term(*m, c * s);
        }
        r
    }
}

impl fmt::Display for Weyl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut e = NCElement::zero(self.space, Calculus::Std, Ordering::STD);
        for (m, c) in &self.terms {
            e.add_term(*m, c.clone());
        }
        write!(f, "{e}")
    }
}

/// At `q = 1` the Heisenberg series equals `Σ tⁿ/n! (i ad_H)ⁿ O` computed in
/// the classical Weyl algebra.
pub fn heisenberg_classical_check(o: &NCElement, h: &Hamiltonian, order: usize) -> VerificationReport {
    let mut rep = VerificationReport::new("heisenberg-classical", h.space().name());
    let mut run = || -> QResult<()> {
        let s = heisenberg_evolve(o, h, order, Picture::Unprimed)?.at_one()?;
        let hw = Weyl::from_element(&h.op)?;
        let mut term = Weyl::from_element(o)?;
        for n in 0..=order {
            let got = Weyl::from_element(&s.coeffs[n])?;
            rep.expect_eq(format!("{o} t^{n}"), &got, &term);
            term = hw.mul(&term).sub(&term.mul(&hw)).scale(&(QScalar::i() / QScalar::int(n as i64 + 1)));
        }
        Ok(())
    };
    if let Err(e) = run() {
        rep.fail(o.to_string(), e, "");
    }
    rep
}

// ---------------------------------------------------------------------------
// Whole-space integrals
// ---------------------------------------------------------------------------

/// Integral variants `d_L, d_L̄, d_R, d_R̄`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IntegralVariant {
    L,
    LBar,
    R,
    RBar,
}

impl IntegralVariant {
    pub const ALL: [IntegralVariant; 4] = [IntegralVariant::L, IntegralVariant::LBar, IntegralVariant::R, IntegralVariant::RBar];
    /// Underlying left integral and the sign relating it to this variant:
    /// `∫d_R̄ = −∫d_L`, `∫d_R = −∫d_L̄`.
    fn base(self) -> (bool, f64) {
        match self {
            IntegralVariant::L => (false, 1.0),
            IntegralVariant::RBar => (false, -1.0),
            IntegralVariant::LBar => (true, 1.0),
            IntegralVariant::R => (true, -1.0),
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            IntegralVariant::L => "L",
            IntegralVariant::LBar => "Lbar",
            IntegralVariant::R => "R",
            IntegralVariant::RBar => "Rbar",
        }
    }
    pub fn parse(s: &str) -> Option<IntegralVariant> {
        IntegralVariant::ALL.into_iter().find(|v| v.name().eq_ignore_ascii_case(s))
    }
}

/// `(D_{q^a})⁻¹|_{−∞}^{∞}` of a lattice function, split at `±1`.
pub fn jackson_whole_line(f: &LatticeFunction, a: i32, tol: f64) -> QResult<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for b in [JacksonBound::ZeroToX, JacksonBound::XToInf, JacksonBound::NegInfToX, JacksonBound::XToZero] {
        acc += jackson_integral_numeric(f, a, b, 0, tol)?;
    }
    Ok(acc)
}

/// Whole-line integral `∫d_γ x f` of a lattice function in `x¹`.
pub fn integrate_whole_line(f: &LatticeFunction, variant: IntegralVariant, tol: f64) -> QResult<Complex64> {
    let (bar, sign) = variant.base();
    Ok(jackson_whole_line(f, if bar { -1 } else { 1 }, tol)? * sign)
}

/// Whole-space integral `∫d_γ³x f(x⁺, x³, x⁻)`:
/// `∫d_L³ = q⁻⁶/4 (D⁺_{q²})⁻¹(D³_{q²})⁻¹(D⁻_{q²})⁻¹` and
/// `∫d_L̄³ = q⁶/4 (D⁻_{q⁻²})⁻¹(D³_{q⁻²})⁻¹(D⁺_{q⁻²})⁻¹`, each over the whole
/// line, with the right variants obtained by the sign relations. The
/// integrand is sampled on the lattice `±q₀^k`, `|k| ≤ k_max`.
pub fn integrate_whole_3d(
    f: impl Fn(f64, f64, f64) -> Complex64,
    q0: f64,
    k_max: i32,
    variant: IntegralVariant,
    tol: f64,
) -> QResult<Complex64> {
    let (bar, sign) = variant.base();
    let a = if bar { -2 } else { 2 };
    let err: RefCell<Option<QError>> = RefCell::new(None);
    let guard = |r: QResult<Complex64>| match r {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            Complex64::new(0.0, 0.0)
        }
    };
    // L: innermost x⁻, then x³, then x⁺; L̄: innermost x⁺.
    let eval = |outer: f64, mid: f64, inner: f64| if bar { f(inner, mid, outer) } else { f(outer, mid, inner) };
    let inner = |o: f64, m: f64| guard(jackson_whole_line(&LatticeFunction::from_fn(q0, k_max, |x| eval(o, m, x)), a, tol));
    let middle = |o: f64| guard(jackson_whole_line(&LatticeFunction::from_fn(q0, k_max, |m| inner(o, m)), a, tol));
    let total = guard(jackson_whole_line(&LatticeFunction::from_fn(q0, k_max, middle), a, tol));
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    let pre = if bar { q0.powi(6) } else { q0.powi(-6) } / 4.0;
    Ok(total * pre * sign)
}

// ---------------------------------------------------------------------------
// Integration by parts
// ---------------------------------------------------------------------------

/// `f` with variable `i` replaced by the value `v`.
fn substitute(f: &CFunction, i: usize, v: &QScalar) -> CFunction {
    f.map_terms(|e, c| {
        let mut e2 = *e;
        let k = e2[i];
        e2[i] = 0;
        CFunction::monomial(f.space, e2, c * &v.pow(k as i32))
    })
}

fn boundary(f: &CFunction, i: usize, a: &QScalar, b: &QScalar) -> CFunction {
    substitute(f, i, b).sub(&substitute(f, i, a))
}

/// Definite inverse derivative `(∂ᵢ)⁻¹|_a^b` of an action mode on the line:
/// time integrals are ordinary, spatial ones are Jackson integrals
/// `(D_q)⁻¹` (▷, ◁̄) or `(D_{q⁻¹})⁻¹` (▷̄, ◁); right modes carry a minus sign.
fn line_definite_integral(mode: ActMode, i: usize, h: &CFunction, a: &QScalar, b: &QScalar) -> CFunction {
    let anti = if i == 0 {
        antiderivative(h, 0)
    } else {
        let base = match mode {
            ActMode::Left | ActMode::RightHat => 1,
            ActMode::LeftHat | ActMode::Right => -1,
        };
        jackson_antiderivative(h, 1, base)
    };
    let r = boundary(&anti, i, a, b);
    if mode.is_left() {
        r
    } else {
        r.neg()
    }
}

/// `Λ^{±1}` factor of the Leibniz rule of a mode (spatial variable only):
/// `Λ ▷ f = f(x⁰, q x¹)` for ▷, `Λ⁻¹ ▷ f` for ▷̄, `g ◁ Λ = g(x⁰, q⁻¹x¹)` for ◁
/// and `g ◁ Λ⁻¹` for ◁̄.
fn line_lambda(mode: ActMode, i: usize, f: &CFunction) -> CFunction {
    if i == 0 {
        return f.clone();
    }
    match mode {
        ActMode::Left | ActMode::RightHat => scale_arg(f, 1, 2),
        ActMode::LeftHat | ActMode::Right => scale_arg(f, 1, -2),
    }
}

/// The eight integration-by-parts rules on the braided line, for polynomial
/// `f, g` on `[a, b]` in either variable, exactly:
/// left `∫(∂f)g = fg| − ∫(Λf)(∂g)`, right `∫f(g◁∂) = fg| − ∫(f◁∂)(g◁Λ)`.
pub fn ibp_check(f: &CFunction, g: &CFunction, a: &QScalar, b: &QScalar) -> VerificationReport {
    let space = Space::Line;
    let mut rep = VerificationReport::new("integration-by-parts", space.name());
    for mode in ActMode::ALL {
        for i in 0..2 {
            let run = || -> QResult<(CFunction, CFunction)> {
                let d = |h: &CFunction| act_partial_closed(space, mode, i, h);
                let bt = boundary(&f.mul(g), i, a, b);
                Ok(if mode.is_left() {
                    let lhs = line_definite_integral(mode, i, &d(f)?.mul(g), a, b);
                    let rhs = bt.sub(&line_definite_integral(mode, i, &line_lambda(mode, i, f).mul(&d(g)?), a, b));
                    (lhs, rhs)
                } else {
                    let lhs = line_definite_integral(mode, i, &f.mul(&d(g)?), a, b);
                    let rhs = bt.sub(&line_definite_integral(mode, i, &d(f)?.mul(&line_lambda(mode, i, g)), a, b));
                    (lhs, rhs)
                })
            };
            let idx = format!("{} x{i}", mode.name());
            match run() {
                Ok((l, r)) => rep.expect_eq(idx, &l, &r),
                Err(e) => rep.fail(idx, e, ""),
            }
        }
    }
    rep
}

/// Lattice Jackson derivative `D_{q^a}`, `a = ±1`; the outermost lattice
/// point on the shifted side is set to zero.
fn lattice_jackson_d(f: &LatticeFunction, a: i32) -> LatticeFunction {
    let q = f.q0;
    let mut samples = Vec::new();
    for s in [1i8, -1] {
        for k in -f.k_max..=f.k_max {
            let x = s as f64 * q.powi(k);
            let v = match (a > 0, f.at(s, k + 1), f.at(s, k - 1)) {
                (true, Some(up), _) => (up - f.at(s, k).unwrap()) / ((q - 1.0) * x),
                (false, _, Some(down)) => (f.at(s, k).unwrap() - down) / ((1.0 - 1.0 / q) * x),
                _ => Complex64::new(0.0, 0.0),
            };
            samples.push((s, k, v));
        }
    }
    LatticeFunction::from_samples(q, f.k_max, &samples)
}

/// `f(q^{±1} x)` on the lattice (zero beyond the cutoff).
fn lattice_shift(f: &LatticeFunction, by: i32) -> LatticeFunction {
    let mut samples = Vec::new();
    for s in [1i8, -1] {
        for k in -f.k_max..=f.k_max {
            samples.push((s, k, f.at(s, k + by).unwrap_or_default()));
        }
    }
    LatticeFunction::from_samples(f.q0, f.k_max, &samples)
}

/// The four spatial integration-by-parts rules evaluated numerically with
/// Jackson sums over `[0, q₀^m]`. Functions are sampled on the lattice;
/// the boundary term at `0` uses the functions' values there. The right
/// derivatives are the negated Jackson derivatives (`◁∂̂₁ = −D_{q⁻¹}`,
/// `◁̄∂₁ = −D_q`), so the right integrals' minus signs cancel against them.
pub fn ibp_numeric_check(
    f: impl Fn(f64) -> Complex64,
    g: impl Fn(f64) -> Complex64,
    q0: f64,
    k_max: i32,
    m: i32,
    tol: f64,
) -> VerificationReport {
    let mut rep = VerificationReport::new("integration-by-parts-numeric", Space::Line.name());
    let fl = LatticeFunction::from_fn(q0, k_max, &f);
    let gl = LatticeFunction::from_fn(q0, k_max, &g);
    let x = q0.powi(m);
    let bt = f(x) * g(x) - f(0.0) * g(0.0);
    for mode in ActMode::ALL {
        // Jackson base and the direction of the Λ shift
        let (base, shift) = match mode {
            ActMode::Left => (1, 1),
            ActMode::LeftHat => (-1, -1),
            ActMode::Right => (-1, -1),
            ActMode::RightHat => (1, 1),
        };
        let int = |h: &LatticeFunction| jackson_integral_numeric(h, base, JacksonBound::ZeroToX, m, tol * 1e-3);
        let df = lattice_jackson_d(&fl, base);
        let dg = lattice_jackson_d(&gl, base);
        let res = if mode.is_left() {
            int(&df.mul(&gl)).and_then(|l| Ok((l, bt - int(&lattice_shift(&fl, shift).mul(&dg))?)))
        } else {
            int(&fl.mul(&dg)).and_then(|l| Ok((l, bt - int(&df.mul(&lattice_shift(&gl, shift)))?)))
        };
        match res {
            Ok((l, r)) if (l - r).norm() <= tol => {}
            Ok((l, r)) => rep.fail(mode.name(), l, r),
            Err(e) => rep.fail(mode.name(), e, ""),
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Sesquilinear forms
// ---------------------------------------------------------------------------

/// Sesquilinear forms `⟨f,g⟩_γ = ∫d_γ f̄ ⊛ g`, `⟨f,g⟩′_γ = ∫d_γ f ⊛ ḡ` and
/// the combinations `⟨,⟩₁ = iⁿ/2 (⟨,⟩_L + ⟨,⟩_R̄)`, `⟨,⟩₂ = iⁿ/2 (⟨,⟩_L̄ + ⟨,⟩_R)`
/// with their primed analogues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SesqForm {
    Gamma(IntegralVariant),
    GammaPrimed(IntegralVariant),
    One,
    Two,
    OnePrimed,
    TwoPrimed,
}

impl SesqForm {
    pub fn name(self) -> String {
        match self {
            SesqForm::Gamma(v) => format!("<,>_{}", v.name()),
            SesqForm::GammaPrimed(v) => format!("<,>'_{}", v.name()),
            SesqForm::One => "<,>_1".into(),
            SesqForm::Two => "<,>_2".into(),
            SesqForm::OnePrimed => "<,>'_1".into(),
            SesqForm::TwoPrimed => "<,>'_2".into(),
        }
    }
}

/// Sesquilinear form on the braided line. The coordinate `x¹` is real and
/// the star product of the line is the pointwise product, so the integrand
/// is `conj(f)·g` (or `f·conj(g)`) on the lattice. The three-dimensional
/// forms need star products of non-polynomial functions and are not
/// provided.
pub fn sesquilinear(f: &LatticeFunction, g: &LatticeFunction, form: SesqForm, tol: f64) -> QResult<Complex64> {
    let half_i = Complex64::new(0.0, 0.5); // iⁿ/2 with n = 1
    let gamma = |v: IntegralVariant, primed: bool| {
        let integrand = if primed { f.mul(&g.conj()) } else { f.conj().mul(g) };
        integrate_whole_line(&integrand, v, tol)
    };
    use IntegralVariant::*;
    Ok(match form {
        SesqForm::Gamma(v) => gamma(v, false)?,
        SesqForm::GammaPrimed(v) => gamma(v, true)?,
        SesqForm::One => half_i * (gamma(L, false)? + gamma(RBar, false)?),
        SesqForm::Two => half_i * (gamma(LBar, false)? + gamma(R, false)?),
        SesqForm::OnePrimed => half_i * (gamma(L, true)? + gamma(RBar, true)?),
        SesqForm::TwoPrimed => half_i * (gamma(LBar, true)? + gamma(R, true)?),
    })
}

/// All forms of `(f, g)` together with `conj⟨g, f⟩`; the symmetry is reported
/// in notes, not asserted. Combined forms whose two halves cancel under the
/// whole-space sign relations are flagged as such.
pub fn sesquilinear_report(f: &LatticeFunction, g: &LatticeFunction, tol: f64) -> VerificationReport {
    let mut rep = VerificationReport::new("sesquilinear", Space::Line.name());
    let mut forms: Vec<SesqForm> = IntegralVariant::ALL.iter().map(|&v| SesqForm::Gamma(v)).collect();
    forms.extend(IntegralVariant::ALL.iter().map(|&v| SesqForm::GammaPrimed(v)));
    forms.extend([SesqForm::One, SesqForm::Two, SesqForm::OnePrimed, SesqForm::TwoPrimed]);
    for form in forms {
        match (sesquilinear(f, g, form, tol), sesquilinear(g, f, form, tol)) {
            (Ok(fg), Ok(gf)) => {
                let sym = (fg - gf.conj()).norm() <= tol.max(tol * fg.norm());
                rep.note(format!(
                    "{}: value {:.12e}{:+.12e}i, conj-symmetric: {}{}",
                    form.name(),
                    fg.re,
                    fg.im,
                    if sym { "yes" } else { "no" },
                    if fg.norm() <= tol { " (vanishes)" } else { "" }
                ));
            }
            (Err(e), _) | (_, Err(e)) => rep.fail(form.name(), e, ""),
        }
    }
    rep
}

// ---------------------------------------------------------------------------
// Aggregate suite
// ---------------------------------------------------------------------------

/// The exact evolution checks of one space with the free Hamiltonian.
pub fn evolution_suite(space: Space, order: usize) -> Vec<VerificationReport> {
    let h = Hamiltonian::free(space);
    let mut out = vec![
        schrodinger_check(&h, order),
        compose_check(&h, order as u32),
        dyson_check(&h, order as u32),
        unitarity_check(&h, order),
    ];
    let coords: Vec<usize> = (1..space.dim()).collect();
    let mut heis = VerificationReport::new("heisenberg", space.name());
    let mut classical = VerificationReport::new("heisenberg-classical", space.name());
    let mut picture = VerificationReport::new("schrodinger-picture", space.name());
    for &i in &coords {
        let o = NCElement::x(space, i);
        heis.absorb(heisenberg_check(&o, &h, order));
        classical.absorb(heisenberg_classical_check(&o, &h, order));
        let mut e = [0u16; 8];
        e[i] = 3;
        picture.absorb(schrodinger_picture_check(&h, &CFunction::monomial(space, e, QScalar::one()), order));
    }
    out.extend([heis, classical, picture]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_u_examples() {
        let h = Hamiltonian::free(Space::Line);
        let u0 = build_u(&h, 0, Direction::Forward);
        assert!(u0.is_identity());
        let u2 = build_u(&h, 2, Direction::Forward);
        let want = h.op.pow(2).unwrap().scale(&QScalar::ratio(-1, 2));
        assert_eq!(u2.coeffs[2], want);
        let z = build_u(&Hamiltonian::zero(Space::Line), 3, Direction::Forward);
        assert!(z.is_identity());
    }

    #[test]
    fn time_derivatives_of_the_modes() {
        for space in [Space::Line, Space::Euclid3] {
            for mode in ActMode::ALL {
                let want = if mode.is_left() { QScalar::int(3) } else { QScalar::int(-3) };
                assert_eq!(time_derivative_factor(space, mode, 3).unwrap(), want, "{space} {mode:?}");
            }
        }
    }

    #[test]
    fn heisenberg_first_order_line() {
        let l = Space::Line;
        let h = Hamiltonian::new(NCElement::d(l, Calculus::Std, 1).pow(2).unwrap(), true).unwrap();
        let x = NCElement::x(l, 1);
        let s = heisenberg_evolve(&x, &h, 2, Picture::Unprimed).unwrap();
        let d1 = NCElement::d(l, Calculus::Std, 1);
        let want = d1
            .scale(&(QScalar::one() + QScalar::q()))
            .add(&x.mul(&d1.pow(2).unwrap()).unwrap().scale(&(QScalar::q_pow(2) - QScalar::one())))
            .unwrap()
            .scale(&QScalar::i());
        assert_eq!(s.coeffs[1], want);
        let classical = element_at_one(&s.coeffs[1]).unwrap();
        assert_eq!(classical, d1.scale(&(QScalar::i() * QScalar::int(2))));
        let hs = heisenberg_evolve(&h.op, &h, 3, Picture::Unprimed).unwrap();
        assert_eq!(hs, OperatorSeries::constant(h.op.clone(), 3).mul(&OperatorSeries::constant(
            NCElement::one(l, Calculus::Std, Ordering::STD),
            3
        ))
        .unwrap());
    }
}
