//! Commutative functions: polynomials over the commuting coordinates,
//! Jackson derivatives and integrals, lattice functions, closed-form
//! derivative actions, scaling substitutions, braided products on the line and
//! the q-constancy test.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{QError, QResult};
use crate::qscalar::{qnum, QScalar};
use crate::space::Space;

/// Exponent vector over at most eight commuting variables.
pub type CMono = [u16; 8];

/// Polynomial in commuting variables with `QScalar` coefficients.
///
/// Variables `0..dim` are the coordinates `x` of the space (in the order
/// `0, 1` or `0, +, 3, −`); a function with two legs additionally carries the
/// variables `dim..2·dim`, the second copy `y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CFunction {
    pub space: Space,
    pub nvars: usize,
    terms: BTreeMap<CMono, QScalar>,
}

impl CFunction {
    pub fn zero(space: Space) -> Self {
        CFunction { space, nvars: space.dim(), terms: BTreeMap::new() }
    }
    pub fn zero_legs(space: Space, legs: usize) -> Self {
        CFunction { space, nvars: space.dim() * legs, terms: BTreeMap::new() }
    }
    pub fn constant(space: Space, c: QScalar) -> Self {
        let mut f = CFunction::zero(space);
        f.add_term([0; 8], c);
        f
    }
    pub fn one(space: Space) -> Self {
        CFunction::constant(space, QScalar::one())
    }
    /// The coordinate variable `i` (first leg).
    pub fn var(space: Space, i: usize) -> Self {
        let mut e = [0u16; 8];
        e[i] = 1;
        CFunction::monomial(space, e, QScalar::one())
    }
    pub fn monomial(space: Space, e: CMono, c: QScalar) -> Self {
        let nvars = if e[space.dim()..].iter().any(|&k| k > 0) { 2 * space.dim() } else { space.dim() };
        let mut f = CFunction { space, nvars, terms: BTreeMap::new() };
        f.add_term(e, c);
        f
    }
    /// Same function viewed over `legs` copies of the coordinates.
    pub fn with_legs(mut self, legs: usize) -> Self {
        self.nvars = self.nvars.max(self.space.dim() * legs);
        self
    }
    pub fn add_term(&mut self, e: CMono, c: QScalar) {
        if c.is_zero() {
            return;
        }
        let d = self.space.dim();
        if e[d..].iter().any(|&k| k > 0) {
            self.nvars = self.nvars.max(2 * d);
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (&CMono, &QScalar)> {
        self.terms.iter()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, e: &CMono) -> QScalar {
        self.terms.get(e).cloned().unwrap_or_else(QScalar::zero)
    }
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&k| k as u32).sum()).max().unwrap_or(0)
    }
    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }
    pub fn add(&self, o: &CFunction) -> CFunction {
        let mut r = self.clone();
        r.nvars = r.nvars.max(o.nvars);
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }
    pub fn sub(&self, o: &CFunction) -> CFunction {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> CFunction {
        self.map_coeffs(|c| -c)
    }
    pub fn scale(&self, s: &QScalar) -> CFunction {
        if s.is_zero() {
            return CFunction { space: self.space, nvars: self.nvars, terms: BTreeMap::new() };
        }
        self.map_coeffs(|c| c * s)
    }
    pub fn map_coeffs(&self, f: impl Fn(&QScalar) -> QScalar) -> CFunction {
        let mut r = CFunction { space: self.space, nvars: self.nvars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            r.add_term(*e, f(c));
        }
        r
    }
    /// Applies a map to every monomial, producing a sum.
    pub fn map_terms(&self, mut f: impl FnMut(&CMono, &QScalar) -> CFunction) -> CFunction {
        let mut r = CFunction { space: self.space, nvars: self.nvars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            r = r.add(&f(e, c));
        }
        r
    }
    pub fn mul(&self, o: &CFunction) -> CFunction {
        let mut r = CFunction { space: self.space, nvars: self.nvars.max(o.nvars), terms: BTreeMap::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let mut e = [0u16; 8];
                for k in 0..8 {
                    e[k] = e1[k] + e2[k];
                }
                r.add_term(e, c1 * c2);
            }
        }
        r
    }
    pub fn pow(&self, n: u32) -> CFunction {
        let mut r = CFunction::one(self.space).with_legs(self.nvars / self.space.dim());
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }
    /// Multiplies by a monomial.
    pub fn mul_mono(&self, m: &CMono, c: &QScalar) -> CFunction {
        let mut r = CFunction { space: self.space, nvars: self.nvars, terms: BTreeMap::new() };
        for (e, k) in &self.terms {
            let mut e2 = *e;
            for i in 0..8 {
                e2[i] += m[i];
            }
            r.add_term(e2, k * c);
        }
        r
    }
    /// Substitution `xᵢ ↦ q^{h/2} xᵢ` (`h` in half units).
    pub fn scale_var(&self, i: usize, half_steps: i32) -> CFunction {
        let mut r = CFunction { space: self.space, nvars: self.nvars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            r.add_term(*e, c * QScalar::q_half_pow(half_steps * e[i] as i32));
        }
        r
    }
    /// Sets variable `i` to zero.
    pub fn set_zero(&self, i: usize) -> CFunction {
        let mut r = CFunction { space: self.space, nvars: self.nvars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            if e[i] == 0 {
                r.add_term(*e, c.clone());
            }
        }
        r
    }
    /// Sets all second-leg variables to zero and drops the leg.
    pub fn drop_second_leg(&self) -> CFunction {
        let d = self.space.dim();
        let mut r = CFunction::zero(self.space);
        for (e, c) in &self.terms {
            if e[d..].iter().all(|&k| k == 0) {
                r.add_term(*e, c.clone());
            }
        }
        r
    }
    /// Permutes variables: variable `i` becomes variable `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> CFunction {
        let mut r = CFunction { space: self.space, nvars: self.nvars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            let mut e2 = [0u16; 8];
            for (i, &p) in perm.iter().enumerate() {
                e2[p] += e[i];
            }
            for i in perm.len()..8 {
                e2[i] += e[i];
            }
            r.add_term(e2, c.clone());
        }
        r.nvars = r.nvars.max(perm.iter().map(|p| p + 1).max().unwrap_or(0));
        r
    }
    /// Moves the first leg into the second (`x ↦ y`).
    pub fn to_second_leg(&self) -> CFunction {
        let d = self.space.dim();
        let perm: Vec<usize> = (0..d).map(|i| i + d).chain(0..d).collect();
        self.permute(&perm)
    }
    /// Swaps `x⁺ ↔ x⁻` on each leg (identity on the line).
    pub fn swap_pm(&self) -> CFunction {
        if self.space == Space::Line {
            return self.clone();
        }
        let perm = [0usize, 3, 2, 1, 4, 7, 6, 5];
        self.permute(&perm)
    }
    /// Applies `q → 1/q` to the coefficients.
    pub fn invert_q(&self) -> CFunction {
        self.map_coeffs(|c| c.invert_q())
    }
    /// Classical limit: every coefficient evaluated at `q = 1`.
    pub fn at_one(&self) -> QResult<CFunction> {
        let mut r = CFunction { space: self.space, nvars: self.nvars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            r.add_term(*e, QScalar::gauss(c.at_one()?));
        }
        Ok(r)
    }
    /// Exact substitution of Gaussian-rational values (q kept symbolic).
    pub fn eval_point(&self, x: &[QScalar]) -> QScalar {
        let mut acc = QScalar::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t * x[i].pow(k as i32);
                }
            }
            acc += &t;
        }
        acc
    }
    /// Numeric evaluation at `q = q0` and complex point `x`.
    pub fn eval_numeric(&self, q0: f64, x: &[Complex64]) -> QResult<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.eval_at(q0)?;
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= x[i].powi(k as i32);
                }
            }
            acc += t;
        }
        Ok(acc)
    }
    /// Variable names of the space (one or two legs).
    pub fn var_names(space: Space) -> [&'static str; 8] {
        match space {
            Space::Line => ["x0", "x1", "y0", "y1", "", "", "", ""],
            Space::Euclid3 => ["x0", "xp", "x3", "xm", "y0", "yp", "y3", "ym"],
        }
    }
}

/// All exponent vectors over the first `nvars` variables with total degree `≤ max`.
pub fn monomials_up_to(nvars: usize, max: u32) -> Vec<CMono> {
    let mut out = Vec::new();
    let mut cur = [0u16; 8];
    fn rec(i: usize, nvars: usize, left: u32, cur: &mut CMono, out: &mut Vec<CMono>) {
        if i == nvars {
            out.push(*cur);
            return;
        }
        for k in 0..=left {
            cur[i] = k as u16;
            rec(i + 1, nvars, left - k, cur, out);
        }
        cur[i] = 0;
    }
    rec(0, nvars, max, &mut cur, &mut out);
    out.sort_by_key(|e| (e.iter().map(|&k| k as u32).sum::<u32>(), std::cmp::Reverse(*e)));
    out
}

/// Formats one term "coef monomial" with the shared coefficient rules.
pub(crate) fn fmt_term(coef: &QScalar, mono: &str) -> String {
    if mono.is_empty() {
        return coef.to_string();
    }
    if coef.is_one() {
        return mono.to_string();
    }
    if (-coef).is_one() {
        return format!("-{mono}");
    }
    let s = coef.to_string();
    let simple = s.chars().skip(1).all(|ch| ch != '+' && ch != '-' && ch != '/') && !s.contains('(');
    if simple {
        format!("{s} {mono}")
    } else {
        format!("({s}) {mono}")
    }
}

/// Joins formatted terms with " + " / " - ".
pub(crate) fn join_terms(parts: Vec<String>) -> String {
    if parts.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, p) in parts.into_iter().enumerate() {
        if k == 0 {
            out.push_str(&p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(&p);
        }
    }
    out
}

pub(crate) fn fmt_power(name: &str, k: u32) -> String {
    if k == 1 {
        name.to_string()
    } else {
        format!("{name}^{k}")
    }
}

impl CFunction {
    /// Terms in display order as (monomial name, coefficient).
    pub fn display_terms(&self) -> Vec<(String, QScalar)> {
        let names = CFunction::var_names(self.space);
        let mut keys: Vec<&CMono> = self.terms.keys().collect();
        keys.sort_by_key(|e| (e.iter().map(|&k| k as u32).sum::<u32>(), std::cmp::Reverse(**e)));
        keys.into_iter()
            .map(|e| {
                let mono: Vec<String> =
                    (0..8).filter(|&i| e[i] > 0).map(|i| fmt_power(names[i], e[i] as u32)).collect();
                (mono.join(" "), self.terms[e].clone())
            })
            .collect()
    }
}

impl fmt::Display for CFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.display_terms().into_iter().map(|(m, c)| fmt_term(&c, &m)).collect();
        write!(f, "{}", join_terms(parts))
    }
}

// ---------------------------------------------------------------------------
// Jackson calculus on polynomials
// ---------------------------------------------------------------------------

/// Jackson derivative `D_{q^a}` in variable `i`:
/// `D_{q^a}(xᵢⁿ m) = [[n]]_{q^a} xᵢ^{n−1} m`.
pub fn jackson_d(f: &CFunction, i: usize, a: i32) -> CFunction {
    f.map_terms(|e, c| {
        let n = e[i];
        if n == 0 {
            return CFunction::zero(f.space);
        }
        let mut e2 = *e;
        e2[i] -= 1;
        CFunction::monomial(f.space, e2, c * qnum(n as u32, a))
    })
}

/// Jackson antiderivative: `xᵢⁿ ↦ xᵢ^{n+1}/[[n+1]]_{q^a}`.
pub fn jackson_antiderivative(f: &CFunction, i: usize, a: i32) -> CFunction {
    f.map_terms(|e, c| {
        let mut e2 = *e;
        e2[i] += 1;
        CFunction::monomial(f.space, e2, c / qnum(e2[i] as u32, a))
    })
}

/// Classical partial derivative in variable `i`.
pub fn partial(f: &CFunction, i: usize) -> CFunction {
    f.map_terms(|e, c| {
        let n = e[i];
        if n == 0 {
            return CFunction::zero(f.space);
        }
        let mut e2 = *e;
        e2[i] -= 1;
        CFunction::monomial(f.space, e2, c * QScalar::int(n as i64))
    })
}

/// Classical antiderivative in variable `i` (vanishing at `xᵢ = 0`).
pub fn antiderivative(f: &CFunction, i: usize) -> CFunction {
    f.map_terms(|e, c| {
        let mut e2 = *e;
        e2[i] += 1;
        CFunction::monomial(f.space, e2, c / QScalar::int(e2[i] as i64))
    })
}

/// Substitution `xᵢ ↦ q^{s/2} xᵢ` (`s` in half steps); `Λ ▷` on the line is
/// `scale_arg(f, 1, 2)`.
pub fn scale_arg(f: &CFunction, i: usize, half_steps: i32) -> CFunction {
    f.scale_var(i, half_steps)
}

/// Difference-quotient definition `(f(q^a x) − f(x))/((q^a − 1)x)` evaluated
/// numerically at a point with `xᵢ ≠ 0`.
pub fn difference_quotient(f: &CFunction, i: usize, a: i32, q0: f64, x: &[Complex64]) -> QResult<Complex64> {
    let qa = q0.powi(a);
    let mut xs = x.to_vec();
    xs[i] *= qa;
    let num = f.eval_numeric(q0, &xs)? - f.eval_numeric(q0, x)?;
    Ok(num / ((qa - 1.0) * x[i]))
}

// ---------------------------------------------------------------------------
// Closed-form operator representations
// ---------------------------------------------------------------------------

/// Elementary operator on commutative functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Op {
    /// `xᵥ ↦ q^{h/2} xᵥ`
    Scale { var: usize, half: i32 },
    /// `D_{q^a}` in variable `var`
    Jackson { var: usize, a: i32 },
    /// `(D_{q^a})⁻¹` (monomial antiderivative)
    JacksonInv { var: usize, a: i32 },
    /// `∂/∂xᵥ`
    Partial { var: usize },
    /// `∫ dxᵥ` from 0
    PartialInv { var: usize },
}

impl Op {
    pub fn apply(&self, f: &CFunction) -> CFunction {
        match *self {
            Op::Scale { var, half } => f.scale_var(var, half),
            Op::Jackson { var, a } => jackson_d(f, var, a),
            Op::JacksonInv { var, a } => jackson_antiderivative(f, var, a),
            Op::Partial { var } => partial(f, var),
            Op::PartialInv { var } => antiderivative(f, var),
        }
    }
    fn map_var(&self, m: &impl Fn(usize) -> usize) -> Op {
        match *self {
            Op::Scale { var, half } => Op::Scale { var: m(var), half },
            Op::Jackson { var, a } => Op::Jackson { var: m(var), a },
            Op::JacksonInv { var, a } => Op::JacksonInv { var: m(var), a },
            Op::Partial { var } => Op::Partial { var: m(var) },
            Op::PartialInv { var } => Op::PartialInv { var: m(var) },
        }
    }
    /// `q → 1/q` applied to the operator (`D_{q^a} → D_{q^{−a}}`, scalings inverted).
    fn invert_q(&self) -> Op {
        match *self {
            Op::Scale { var, half } => Op::Scale { var, half: -half },
            Op::Jackson { var, a } => Op::Jackson { var, a: -a },
            Op::JacksonInv { var, a } => Op::JacksonInv { var, a: -a },
            ref o => o.clone(),
        }
    }
}

/// `coeff · x^mult · ops[0] ∘ ops[1] ∘ … ∘ ops[n−1]` (rightmost op applied first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CTerm {
    pub coeff: QScalar,
    pub mult: CMono,
    pub ops: Vec<Op>,
}

/// A closed-form operator: a sum of [`CTerm`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub terms: Vec<CTerm>,
}

impl ClosedForm {
    pub fn single(coeff: QScalar, ops: Vec<Op>) -> Self {
        ClosedForm { terms: vec![CTerm { coeff, mult: [0; 8], ops }] }
    }
    pub fn apply(&self, f: &CFunction) -> CFunction {
        let mut acc = CFunction::zero(f.space).with_legs(f.nvars / f.space.dim());
        for t in &self.terms {
            let mut g = f.clone();
            for op in t.ops.iter().rev() {
                g = op.apply(&g);
            }
            acc = acc.add(&g.mul_mono(&t.mult, &t.coeff));
        }
        acc
    }
    fn map(&self, space: Space, swap: bool, inv_q: bool, sign: i64) -> ClosedForm {
        let m = |v: usize| if swap && space == Space::Euclid3 { [0, 3, 2, 1][v] } else { v };
        ClosedForm {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let mut mult = [0u16; 8];
                    for v in 0..space.dim() {
                        mult[m(v)] = t.mult[v];
                    }
                    let coeff = if inv_q { t.coeff.invert_q() } else { t.coeff.clone() } * QScalar::int(sign);
                    let ops = t
                        .ops
                        .iter()
                        .map(|o| {
                            let o = o.map_var(&m);
                            if inv_q {
                                o.invert_q()
                            } else {
                                o
                            }
                        })
                        .collect();
                    CTerm { coeff, mult, ops }
                })
                .collect(),
        }
    }
    /// First transition rule: `D^±_{q^a} → D^∓_{q^{−a}}`, `x^± → x^∓`, `q → 1/q`.
    pub fn trans_rule_1(&self, space: Space) -> ClosedForm {
        self.map(space, true, true, 1)
    }
    /// Second transition rule: `D^±_{q^a} → D^∓_{q^a}`, `x^± → x^∓`; left and
    /// right actions differ by the overall sign of the right representation.
    pub fn trans_rule_2(&self, space: Space) -> ClosedForm {
        self.map(space, true, false, -1)
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                let mut s = Vec::new();
                let names = ["0", "1", "2", "3"];
                for (v, &k) in t.mult.iter().enumerate() {
                    if k > 0 {
                        s.push(fmt_power(&format!("x{}", names[v.min(3)]), k as u32));
                    }
                }
                for o in &t.ops {
                    s.push(format!("{o:?}"));
                }
                fmt_term(&t.coeff, &s.join(" "))
            })
            .collect();
        write!(f, "{}", join_terms(parts))
    }
}

/// Conjugate index: `(+, 3, −, 0) ↦ (−, 3, +, 0)`.
pub fn bar_index(space: Space, i: usize) -> usize {
    match space {
        Space::Line => i,
        Space::Euclid3 => [0, 3, 2, 1][i],
    }
}

/// Tabulated left representations `∂ᵢ ▷ f`.
fn left_closed_form(space: Space, i: usize) -> ClosedForm {
    use Op::*;
    let one = QScalar::one();
    match (space, i) {
        (_, 0) => ClosedForm::single(one, vec![Partial { var: 0 }]),
        (Space::Line, 1) => ClosedForm::single(one, vec![Jackson { var: 1, a: 1 }]),
        (Space::Euclid3, 1) => ClosedForm::single(one, vec![Jackson { var: 1, a: 4 }]),
        (Space::Euclid3, 2) => ClosedForm::single(one, vec![Jackson { var: 2, a: 2 }, Scale { var: 1, half: 4 }]),
        (Space::Euclid3, 3) => {
            let mut xp = [0u16; 8];
            xp[1] = 1;
            ClosedForm {
                terms: vec![
                    CTerm { coeff: one, mult: [0; 8], ops: vec![Jackson { var: 3, a: 4 }, Scale { var: 2, half: 4 }] },
                    CTerm {
                        coeff: QScalar::lambda(),
                        mult: xp,
                        ops: vec![Jackson { var: 2, a: 2 }, Jackson { var: 2, a: 2 }],
                    },
                ],
            }
        }
        _ => panic!("derivative index out of range"),
    }
}

/// Closed-form representation of the derivative symbol with index
/// `i` for an action mode (▷ on f, ▷̄ on f̃, ◁ on f̃, ◁̄ on f). The hatted and
/// right variants are generated from the tabulated left forms by the two
/// transition rules.
pub fn closed_form(space: Space, mode: crate::ncalgebra::ActMode, i: usize) -> QResult<ClosedForm> {
    use crate::ncalgebra::ActMode::*;
    if i >= space.dim() {
        return Err(QError::Invalid(format!("derivative index {i} out of range for {space}")));
    }
    let b = bar_index(space, i);
    Ok(match mode {
        Left => left_closed_form(space, i),
        LeftHat => left_closed_form(space, b).trans_rule_1(space),
        RightHat => left_closed_form(space, b).trans_rule_2(space),
        Right => left_closed_form(space, i).trans_rule_1(space).trans_rule_2(space),
    })
}

/// Tabulated left representations of the inverse derivatives. The series of
/// `(∂−)⁻¹` is truncated at `kmax` (exact when `2·kmax ≥ deg_{x3}`).
fn left_inverse_form(space: Space, i: usize, kmax: u32) -> ClosedForm {
    use Op::*;
    let one = QScalar::one();
    match (space, i) {
        (_, 0) => ClosedForm::single(one, vec![PartialInv { var: 0 }]),
        (Space::Line, 1) => ClosedForm::single(one, vec![JacksonInv { var: 1, a: 1 }]),
        (Space::Euclid3, 1) => ClosedForm::single(one, vec![JacksonInv { var: 1, a: 4 }]),
        (Space::Euclid3, 2) => ClosedForm::single(one, vec![JacksonInv { var: 2, a: 2 }, Scale { var: 1, half: -4 }]),
        (Space::Euclid3, 3) => {
            let mut terms = Vec::new();
            for k in 0..=kmax as i32 {
                let mut mult = [0u16; 8];
                mult[1] = k as u16;
                let coeff = QScalar::q_pow(2 * k * (k + 1)) * (-QScalar::lambda()).pow(k);
                let mut ops = Vec::new();
                for _ in 0..2 * k {
                    ops.push(Jackson { var: 2, a: 2 });
                }
                for _ in 0..=k {
                    ops.push(JacksonInv { var: 3, a: 4 });
                }
                ops.push(Scale { var: 2, half: -4 * (k + 1) });
                terms.push(CTerm { coeff, mult, ops });
            }
            ClosedForm { terms }
        }
        _ => panic!("derivative index out of range"),
    }
}

/// Closed form of the inverse derivative for an action mode.
pub fn inverse_closed_form(space: Space, mode: crate::ncalgebra::ActMode, i: usize, kmax: u32) -> QResult<ClosedForm> {
    use crate::ncalgebra::ActMode::*;
    if i >= space.dim() {
        return Err(QError::Invalid(format!("derivative index {i} out of range for {space}")));
    }
    let b = bar_index(space, i);
    Ok(match mode {
        Left => left_inverse_form(space, i, kmax),
        LeftHat => left_inverse_form(space, b, kmax).trans_rule_1(space),
        RightHat => left_inverse_form(space, b, kmax).trans_rule_2(space),
        Right => left_inverse_form(space, i, kmax).trans_rule_1(space).trans_rule_2(space),
    })
}

/// `∂ᵢ` acting on `f` through its closed form.
pub fn act_partial_closed(space: Space, mode: crate::ncalgebra::ActMode, i: usize, f: &CFunction) -> QResult<CFunction> {
    if f.space != space {
        return Err(QError::MixedSpace(format!("{} function with {} operator", f.space, space)));
    }
    Ok(closed_form(space, mode, i)?.apply(f))
}

/// `(∂ᵢ)⁻¹` acting on a polynomial through its closed form.
pub fn act_inverse_partial(space: Space, mode: crate::ncalgebra::ActMode, i: usize, f: &CFunction) -> QResult<CFunction> {
    if f.space != space {
        return Err(QError::MixedSpace(format!("{} function with {} operator", f.space, space)));
    }
    let kmax = (f.degree_in(2) as u32) / 2 + 1;
    Ok(inverse_closed_form(space, mode, i, kmax)?.apply(f))
}

// ---------------------------------------------------------------------------
// Braided products and q-constancy on the line
// ---------------------------------------------------------------------------

/// Braided product variant on the line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BraidVariant {
    /// `⊙_L`: factor `q^{−n̂_{y¹} n̂_{x¹}}`
    L,
    /// `⊙_L̄`: factor `q^{+n̂_{y¹} n̂_{x¹}}`
    LBar,
}

/// `f(x) ⊙ g(y)` on the line: the two-leg function `q^{±n̂_{y¹}n̂_{x¹}} g(y) f(x)`.
pub fn braided_product_line(f: &CFunction, g: &CFunction, variant: BraidVariant) -> QResult<CFunction> {
    if f.space != Space::Line || g.space != Space::Line {
        return Err(QError::Unsupported("braided products are implemented for the braided line only".into()));
    }
    let sign = if variant == BraidVariant::LBar { 1 } else { -1 };
    let gy = g.to_second_leg();
    let mut r = CFunction::zero_legs(Space::Line, 2);
    for (e1, c1) in f.terms() {
        for (e2, c2) in gy.terms() {
            let mut e = *e1;
            for k in 0..8 {
                e[k] += e2[k];
            }
            let pw = sign * e1[1] as i32 * e2[3] as i32;
            r.add_term(e, c1 * c2 * QScalar::q_pow(pw));
        }
    }
    Ok(r)
}

/// True iff `∂0 ▷ f = 0` and `∂1 ▷ f = 0` (line).
pub fn is_qconstant(f: &CFunction) -> QResult<bool> {
    if f.space != Space::Line {
        return Err(QError::Unsupported("q-constancy is defined on the braided line".into()));
    }
    use crate::ncalgebra::ActMode::Left;
    Ok(act_partial_closed(Space::Line, Left, 0, f)?.is_zero() && act_partial_closed(Space::Line, Left, 1, f)?.is_zero())
}

// ---------------------------------------------------------------------------
// Lattice functions and numeric Jackson integrals
// ---------------------------------------------------------------------------

/// Samples of a one-variable function on the lattice `±q₀^k`, `|k| ≤ K`.
#[derive(Clone, Debug)]
pub struct LatticeFunction {
    pub q0: f64,
    pub k_max: i32,
    pos: Vec<Complex64>,
    neg: Vec<Complex64>,
}

impl LatticeFunction {
    pub fn from_fn(q0: f64, k_max: i32, f: impl Fn(f64) -> Complex64) -> Self {
        assert!(q0 > 1.0, "lattice functions need q0 > 1");
        let pts = |s: f64| (-k_max..=k_max).map(|k| f(s * q0.powi(k))).collect();
        LatticeFunction { q0, k_max, pos: pts(1.0), neg: pts(-1.0) }
    }
    /// Builds a lattice function from explicit samples `(sign, k, value)`;
    /// missing points are zero.
    pub fn from_samples(q0: f64, k_max: i32, samples: &[(i8, i32, Complex64)]) -> Self {
        let n = (2 * k_max + 1) as usize;
        let mut lf = LatticeFunction { q0, k_max, pos: vec![Complex64::new(0.0, 0.0); n], neg: vec![Complex64::new(0.0, 0.0); n] };
        for &(s, k, v) in samples {
            if k.abs() <= k_max {
                let idx = (k + k_max) as usize;
                if s >= 0 {
                    lf.pos[idx] = v;
                } else {
                    lf.neg[idx] = v;
                }
            }
        }
        lf
    }
    pub fn zero(q0: f64, k_max: i32) -> Self {
        LatticeFunction::from_fn(q0, k_max, |_| Complex64::new(0.0, 0.0))
    }
    /// Value at `sign · q₀^k`.
    pub fn at(&self, sign: i8, k: i32) -> Option<Complex64> {
        if k.abs() > self.k_max {
            return None;
        }
        let idx = (k + self.k_max) as usize;
        Some(if sign >= 0 { self.pos[idx] } else { self.neg[idx] })
    }
    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> LatticeFunction {
        let mut r = self.clone();
        for k in -self.k_max..=self.k_max {
            let idx = (k + self.k_max) as usize;
            r.pos[idx] = f(self.q0.powi(k), self.pos[idx]);
            r.neg[idx] = f(-self.q0.powi(k), self.neg[idx]);
        }
        r
    }
    pub fn mul(&self, o: &LatticeFunction) -> LatticeFunction {
        let mut r = self.clone();
        for idx in 0..r.pos.len() {
            r.pos[idx] *= o.pos[idx];
            r.neg[idx] *= o.neg[idx];
        }
        r
    }
    pub fn conj(&self) -> LatticeFunction {
        self.map(|_, v| v.conj())
    }
}

/// Integration range of a Jackson integral.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacksonBound {
    /// `∫₀^x`, `x = q₀^m > 0`
    ZeroToX,
    /// `∫ₓ^∞`, `x = q₀^m > 0`
    XToInf,
    /// `∫ₓ⁰`, `x = −q₀^m < 0`
    XToZero,
    /// `∫_{−∞}^x`, `x = −q₀^m < 0`
    NegInfToX,
}

/// Sum `Σ_{k ≥ k0} (q^{dir·|a|k} x) f(q^{dir·|a|k} x)` on the lattice, truncated
/// once three consecutive terms fall below `tol`.
fn lattice_sum(f: &LatticeFunction, sign: i8, m: i32, step: i32, k0: i32, tol: f64) -> QResult<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut small = 0;
    let mut k = k0;
    loop {
        let e = m + step * k;
        let Some(v) = f.at(sign, e) else {
            return Err(QError::NonConvergence(format!(
                "Jackson sum did not decay below {tol:e} within the lattice cutoff {}",
                f.k_max
            )));
        };
        let term = v * (sign as f64) * f.q0.powi(e);
        acc += term;
        if term.norm() < tol {
            small += 1;
            if small >= 3 {
                return Ok(acc);
            }
        } else {
            small = 0;
        }
        k += 1;
    }
}

/// Numeric Jackson integral `(D_{q^a})⁻¹` (`a ≠ 0`; negative `a` means the
/// `D_{q^{−|a|}}` family) with the tabulated sign conventions.
pub fn jackson_integral_numeric(f: &LatticeFunction, a: i32, bound: JacksonBound, m: i32, tol: f64) -> QResult<Complex64> {
    if a == 0 {
        return Err(QError::Invalid("Jackson base exponent must be nonzero".into()));
    }
    let q = f.q0;
    let aa = a.abs();
    let pre_pos = 1.0 - q.powi(aa); // (1 − q^a)
    let pre_neg = 1.0 - q.powi(-aa); // (1 − q^{−a})
    let r = match (a > 0, bound) {
        (true, JacksonBound::ZeroToX) => -pre_pos * lattice_sum(f, 1, m, -aa, 1, tol)?,
        (true, JacksonBound::XToInf) => -pre_pos * lattice_sum(f, 1, m, aa, 0, tol)?,
        (false, JacksonBound::ZeroToX) => pre_neg * lattice_sum(f, 1, m, -aa, 0, tol)?,
        (false, JacksonBound::XToInf) => pre_neg * lattice_sum(f, 1, m, aa, 1, tol)?,
        (true, JacksonBound::XToZero) => pre_pos * lattice_sum(f, -1, m, -aa, 1, tol)?,
        (true, JacksonBound::NegInfToX) => pre_pos * lattice_sum(f, -1, m, aa, 0, tol)?,
        (false, JacksonBound::XToZero) => -pre_neg * lattice_sum(f, -1, m, -aa, 0, tol)?,
        (false, JacksonBound::NegInfToX) => -pre_neg * lattice_sum(f, -1, m, aa, 1, tol)?,
    };
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalgebra::ActMode;

    fn mono(space: Space, e: &[u16]) -> CFunction {
        let mut m = [0u16; 8];
        m[..e.len()].copy_from_slice(e);
        CFunction::monomial(space, m, QScalar::one())
    }

    #[test]
    fn jackson_examples() {
        let l = Space::Line;
        let d = jackson_d(&mono(l, &[0, 2]), 1, 1);
        assert_eq!(d, mono(l, &[0, 1]).scale(&(QScalar::one() + QScalar::q())));
        assert!(jackson_d(&mono(l, &[3, 0]), 1, 1).is_zero());
        let a = jackson_antiderivative(&mono(l, &[0, 1]), 1, 1);
        assert_eq!(a, mono(l, &[0, 2]).scale(&(QScalar::one() + QScalar::q()).inv()));
        assert_eq!(jackson_antiderivative(&CFunction::one(l), 1, 1), mono(l, &[0, 1]));
    }

    #[test]
    fn closed_form_examples() {
        let e = Space::Euclid3;
        let r = act_partial_closed(e, ActMode::Left, 3, &mono(e, &[0, 0, 2, 0])).unwrap();
        assert_eq!(r, mono(e, &[0, 1, 0, 0]).scale(&(QScalar::lambda() * (QScalar::one() + QScalar::q_pow(2)))));
        let r = act_partial_closed(e, ActMode::Left, 0, &mono(e, &[2, 0, 0, 0])).unwrap();
        assert_eq!(r, mono(e, &[1, 0, 0, 0]).scale(&QScalar::int(2)));
        let l = Space::Line;
        let r = act_partial_closed(l, ActMode::RightHat, 1, &mono(l, &[0, 2])).unwrap();
        assert_eq!(r, mono(l, &[0, 1]).scale(&-(QScalar::one() + QScalar::q())));
        let r = act_inverse_partial(e, ActMode::Left, 1, &CFunction::one(e)).unwrap();
        assert_eq!(r, mono(e, &[0, 1, 0, 0]));
        let r = act_inverse_partial(e, ActMode::Left, 3, &CFunction::one(e)).unwrap();
        assert_eq!(r, mono(e, &[0, 0, 0, 1]));
    }

    #[test]
    fn closed_form_line_variants() {
        // ▷̄ ∂̂1 = D_{q⁻¹}, ◁ ∂̂1 = −D_{q⁻¹}, ◁̄ ∂1 = −D_q, time: ±∂/∂x0.
        let l = Space::Line;
        use Op::*;
        let one = QScalar::one();
        let m1 = -one.clone();
        assert_eq!(closed_form(l, ActMode::LeftHat, 1).unwrap(), ClosedForm::single(one.clone(), vec![Jackson { var: 1, a: -1 }]));
        assert_eq!(closed_form(l, ActMode::Right, 1).unwrap(), ClosedForm::single(m1.clone(), vec![Jackson { var: 1, a: -1 }]));
        assert_eq!(closed_form(l, ActMode::RightHat, 1).unwrap(), ClosedForm::single(m1.clone(), vec![Jackson { var: 1, a: 1 }]));
        for m in [ActMode::Right, ActMode::RightHat] {
            assert_eq!(closed_form(l, m, 0).unwrap(), ClosedForm::single(m1.clone(), vec![Partial { var: 0 }]));
        }
        assert_eq!(inverse_closed_form(l, ActMode::Right, 1, 0).unwrap(), ClosedForm::single(m1, vec![JacksonInv { var: 1, a: -1 }]));
    }

    #[test]
    fn jackson_numeric() {
        let q0 = 1.1;
        let one = LatticeFunction::from_fn(q0, 600, |_| Complex64::new(1.0, 0.0));
        let v = jackson_integral_numeric(&one, 1, JacksonBound::ZeroToX, 0, 1e-14).unwrap();
        assert!((v.re - 1.0).abs() < 1e-10);
        let x = LatticeFunction::from_fn(q0, 600, |t| Complex64::new(t, 0.0));
        let v = jackson_integral_numeric(&x, 1, JacksonBound::ZeroToX, 0, 1e-14).unwrap();
        assert!((v.re - 1.0 / (1.0 + q0)).abs() < 1e-10);
        let z = LatticeFunction::zero(q0, 50);
        assert_eq!(jackson_integral_numeric(&z, 1, JacksonBound::ZeroToX, 0, 1e-12).unwrap().norm(), 0.0);
        // non-decaying within the cutoff
        assert!(jackson_integral_numeric(&one, 1, JacksonBound::XToInf, 0, 1e-12).is_err());
    }

    #[test]
    fn braided_and_qconstant() {
        let l = Space::Line;
        let r = braided_product_line(&mono(l, &[0, 1]), &mono(l, &[0, 1]), BraidVariant::LBar).unwrap();
        assert_eq!(r, CFunction::monomial(l, [0, 1, 0, 1, 0, 0, 0, 0], QScalar::q()));
        let r = braided_product_line(&mono(l, &[1, 0]), &mono(l, &[0, 1]), BraidVariant::L).unwrap();
        assert_eq!(r, CFunction::monomial(l, [1, 0, 0, 1, 0, 0, 0, 0], QScalar::one()));
        assert!(is_qconstant(&CFunction::constant(l, QScalar::int(5))).unwrap());
        assert!(!is_qconstant(&mono(l, &[0, 1])).unwrap());
        assert!(!is_qconstant(&mono(l, &[1, 0]).add(&mono(l, &[0, 1]))).unwrap());
        assert!(braided_product_line(&CFunction::one(Space::Euclid3), &CFunction::one(Space::Euclid3), BraidVariant::L).is_err());
    }
}
