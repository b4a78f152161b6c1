//! Evaluation of parse trees: lowercase variables build commutative
//! functions, capitalized coordinates and derivatives build normal-ordered
//! algebra elements, `th`/`dth` build Grassmann elements.

use num_complex::Complex64;
use qspace_core::grassmann::{g_normal_form, GCalculus, GElement};
use qspace_core::ncalgebra::{hat_power, Calculus, Gen, NCElement, NcMono, Ordering, Side};
use qspace_core::qfunc::CFunction;
use qspace_core::{QScalar, Space};

use crate::error::CliError;
use crate::expr::{Expr, Label, Scalar, Var};

/// Result of evaluating an expression.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Comm(CFunction),
    Nc(NCElement),
    Grass(GElement),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Comm(c) => write!(f, "{c}"),
            Value::Nc(n) => write!(f, "{n}"),
            Value::Grass(g) => write!(f, "{g}"),
        }
    }
}

/// Which algebra an expression lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Comm,
    Nc(Calculus),
    Grass(GCalculus),
}

/// Index of a coordinate label in the space's generator order.
pub fn label_index(label: Label, space: Space) -> Result<usize, CliError> {
    let idx = match (space, label) {
        (_, Label::L0) => Some(0),
        (Space::Line, Label::L1) => Some(1),
        (Space::Euclid3, Label::P) => Some(1),
        (Space::Euclid3, Label::L3) => Some(2),
        (Space::Euclid3, Label::M) => Some(3),
        _ => None,
    };
    idx.ok_or_else(|| CliError::eval(format!("label '{}' does not exist on the {} space", label.suffix(), space.name())))
}

/// Index of a commutative variable name such as `x1` or `xp`.
pub fn var_index(name: &str, space: Space) -> Result<usize, CliError> {
    match crate::expr::parse(name)? {
        Expr::Var(Var::Comm(l)) => label_index(l, space),
        _ => Err(CliError::eval(format!("'{name}' is not a coordinate name (expected x0, x1, xp, x3 or xm)"))),
    }
}

fn kind_of(e: &Expr, space: Space) -> Result<Kind, CliError> {
    let vars = e.vars();
    if vars.iter().any(|v| v.is_grassmann()) {
        if space != Space::Line {
            return Err(CliError::eval("Grassmann variables live on the braided line (use --space line)"));
        }
        let std = vars.iter().any(|v| matches!(v, Var::ThetaDeriv(_)));
        let hat = vars.iter().any(|v| matches!(v, Var::ThetaDerivHat(_)));
        if std && hat {
            return Err(CliError::eval("cannot mix dth and dhth derivatives in one expression"));
        }
        return Ok(Kind::Grass(if hat { GCalculus::Hat } else { GCalculus::Std }));
    }
    if vars.iter().all(|v| v.is_commutative()) {
        return Ok(Kind::Comm);
    }
    let std = vars.iter().any(|v| matches!(v, Var::Deriv(_)));
    let hat = vars.iter().any(|v| matches!(v, Var::DerivHat(_)));
    if std && hat {
        return Err(CliError::eval("cannot mix d and dh derivatives in one expression"));
    }
    Ok(Kind::Nc(if hat { Calculus::Conj } else { Calculus::Std }))
}

struct Ctx {
    space: Space,
    kind: Kind,
}

impl Ctx {
    fn scalar(&self, c: QScalar) -> Value {
        match self.kind {
            Kind::Comm => Value::Comm(CFunction::constant(self.space, c)),
            Kind::Nc(calc) => Value::Nc(NCElement::scalar(self.space, calc, Ordering::STD, c)),
            Kind::Grass(calc) => Value::Grass(g_normal_form(calc, Side::CoordFirst, &[], c)),
        }
    }

    fn var(&self, v: Var) -> Result<Value, CliError> {
        let sp = self.space;
        let gen = |g: Gen, calc: Calculus| NCElement::gen(sp, calc, Ordering::STD, g).map_err(CliError::from);
        Ok(match (v, self.kind) {
            (Var::Comm(l), _) => Value::Comm(CFunction::var(sp, label_index(l, sp)?)),
            (Var::Coord(l), Kind::Nc(c)) => Value::Nc(gen(Gen::X(label_index(l, sp)?), c)?),
            (Var::Deriv(l), Kind::Nc(c)) => Value::Nc(gen(Gen::D(label_index(l, sp)?), c)?),
            (Var::DerivHat(l), Kind::Nc(c)) => {
                let i = label_index(l, sp)?;
                Value::Nc(gen(Gen::D(i), c)?.scale(&QScalar::q_pow(hat_power(sp, i))))
            }
            (Var::Lam, Kind::Nc(c)) => Value::Nc(gen(Gen::Lam(2), c)?),
            (Var::Theta(k), Kind::Grass(c)) => Value::Grass(g_normal_form(c, Side::CoordFirst, &[k], QScalar::one())),
            (Var::ThetaDeriv(k) | Var::ThetaDerivHat(k), Kind::Grass(c)) => {
                Value::Grass(g_normal_form(c, Side::CoordFirst, &[2 + k], QScalar::one()))
            }
            (v, _) => return Err(CliError::eval(format!("variable '{}' cannot be used here", v.name()))),
        })
    }

    fn eval(&self, e: &Expr) -> Result<Value, CliError> {
        match e {
            Expr::Int(n) => {
                let n = i64::try_from(*n).map_err(|_| CliError::eval("integer literal too large"))?;
                Ok(self.scalar(QScalar::int(n)))
            }
            Expr::Scalar(s) => Ok(self.scalar(scalar_value(*s))),
            Expr::Var(v) => self.var(*v),
            Expr::Pow(b, x) => self.pow(b, x.num, x.den),
            Expr::Term(first, rest) => {
                let mut acc = self.eval(first)?;
                for (div, f) in rest {
                    let v = self.eval(f)?;
                    acc = if *div {
                        let c = as_scalar(&v)
                            .ok_or_else(|| CliError::eval(format!("cannot divide by the non-scalar '{f}'")))?;
                        let inv = c.try_inv().map_err(|_| CliError::eval(format!("division by zero ('{f}')")))?;
                        scale(&acc, &inv)
                    } else {
                        mul(&acc, &v)?
                    };
                }
                Ok(acc)
            }
            Expr::Sum(ts) => {
                let mut acc = self.scalar(QScalar::zero());
                for (neg, t) in ts {
                    let mut v = self.eval(t)?;
                    if *neg {
                        v = scale(&v, &-QScalar::one());
                    }
                    acc = add(&acc, &v)?;
                }
                Ok(acc)
            }
        }
    }

    fn pow(&self, base: &Expr, num: i64, den: i64) -> Result<Value, CliError> {
        let n = i32::try_from(num).map_err(|_| CliError::eval("exponent too large"))?;
        match (base, den) {
            (Expr::Scalar(Scalar::Q), 1 | 2) => return Ok(self.scalar(QScalar::q_half_pow(n * (2 / den as i32)))),
            (Expr::Var(Var::Lam), 1 | 2) => {
                if let Kind::Nc(c) = self.kind {
                    let g = NCElement::gen(self.space, c, Ordering::STD, Gen::Lam(n * (2 / den as i32)))?;
                    return Ok(Value::Nc(g));
                }
            }
            (_, 1) => {}
            _ => return Err(CliError::eval(format!("fractional powers are only defined for q and L, not '{base}'"))),
        }
        let b = self.eval(base)?;
        if let Some(c) = as_scalar(&b) {
            if n < 0 && c.is_zero() {
                return Err(CliError::eval("negative power of zero"));
            }
            return Ok(self.scalar(c.pow(n)));
        }
        if n < 0 {
            return Err(CliError::eval(format!("negative power of the non-invertible element '{base}'")));
        }
        let mut acc = self.scalar(QScalar::one());
        for _ in 0..n {
            acc = mul(&acc, &b)?;
        }
        Ok(acc)
    }
}

fn scalar_value(s: Scalar) -> QScalar {
    match s {
        Scalar::Q => QScalar::q(),
        Scalar::I => QScalar::i(),
        Scalar::Lambda => QScalar::lambda(),
        Scalar::LambdaPlus => QScalar::lambda_plus(),
    }
}

/// The constant value of a purely scalar element.
pub fn as_scalar(v: &Value) -> Option<QScalar> {
    match v {
        Value::Comm(f) => {
            let mut c = QScalar::zero();
            for (m, k) in f.terms() {
                if m.iter().any(|&e| e != 0) {
                    return None;
                }
                c = k.clone();
            }
            Some(c)
        }
        Value::Nc(x) => {
            let mut c = QScalar::zero();
            for (m, k) in x.terms() {
                if *m != NcMono::ONE {
                    return None;
                }
                c = k.clone();
            }
            Some(c)
        }
        Value::Grass(g) => {
            let mut c = QScalar::zero();
            for (w, k) in g.terms() {
                if !w.is_empty() {
                    return None;
                }
                c = k.clone();
            }
            Some(c)
        }
    }
}

fn scale(v: &Value, c: &QScalar) -> Value {
    match v {
        Value::Comm(f) => Value::Comm(f.scale(c)),
        Value::Nc(x) => Value::Nc(x.scale(c)),
        Value::Grass(g) => {
            let mut r = GElement::zero(g.calc, g.side);
            for (w, k) in g.terms() {
                r.add_term(w.clone(), k * c);
            }
            Value::Grass(r)
        }
    }
}

fn add(a: &Value, b: &Value) -> Result<Value, CliError> {
    Ok(match (a, b) {
        (Value::Comm(x), Value::Comm(y)) => Value::Comm(x.add(y)),
        (Value::Nc(x), Value::Nc(y)) => Value::Nc(x.add(y)?),
        (Value::Grass(x), Value::Grass(y)) => {
            let mut r = x.clone();
            for (w, k) in y.terms() {
                r.add_term(w.clone(), k.clone());
            }
            Value::Grass(r)
        }
        _ => return Err(CliError::eval("operands live in different algebras")),
    })
}

fn mul(a: &Value, b: &Value) -> Result<Value, CliError> {
    Ok(match (a, b) {
        (Value::Comm(x), Value::Comm(y)) => Value::Comm(x.mul(y)),
        (Value::Nc(x), Value::Nc(y)) => Value::Nc(x.mul(y)?),
        (Value::Grass(x), Value::Grass(y)) => Value::Grass(x.mul(y)),
        _ => return Err(CliError::eval("operands live in different algebras")),
    })
}

/// Evaluates an expression on a space. Noncommutative products keep the
/// written factor order and are brought to normal form.
pub fn evaluate(e: &Expr, space: Space) -> Result<Value, CliError> {
    let ctx = Ctx { space, kind: kind_of(e, space)? };
    ctx.eval(e)
}

/// Parses and evaluates a commutative function.
pub fn parse_function(src: &str, space: Space) -> Result<CFunction, CliError> {
    match evaluate(&crate::expr::parse(src)?, space)? {
        Value::Comm(f) => Ok(f),
        _ => Err(CliError::eval(format!("'{src}' is not a commutative function (use lowercase x0, x1, xp, x3, xm)"))),
    }
}

/// Parses and evaluates a noncommutative element.
pub fn parse_element(src: &str, space: Space) -> Result<NCElement, CliError> {
    match evaluate(&crate::expr::parse(src)?, space)? {
        Value::Nc(x) => Ok(x),
        Value::Comm(f) if f.terms().all(|(m, _)| m.iter().all(|&e| e == 0)) => {
            Ok(NCElement::from_cfunction(&f, Calculus::Std, Ordering::STD))
        }
        _ => Err(CliError::eval(format!("'{src}' is not an element of the quantum-space algebra (use X…, d…, dh…, L)"))),
    }
}

// ---------------------------------------------------------------------------
// Numeric printing
// ---------------------------------------------------------------------------

/// A real number with 12 significant digits and trailing zeros removed.
fn fmt_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).clamp(0, 17) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Formats a complex number compactly (`1.5`, `-2i`, `(1.5+2i)`).
pub fn fmt_complex(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 1e-15 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    match (re == 0.0, im == 0.0) {
        (_, true) => fmt_real(re),
        (true, false) => format!("{}i", fmt_real(im)),
        (false, false) => format!("({}{}{}i)", fmt_real(re), if im < 0.0 { "-" } else { "+" }, fmt_real(im.abs())),
    }
}

fn join_numeric(parts: Vec<(String, Complex64)>) -> String {
    let mut out = String::new();
    for (name, z) in parts {
        let s = fmt_complex(z);
        let (neg, s) = match s.strip_prefix('-') {
            Some(r) => (true, r.to_string()),
            None => (false, s),
        };
        let body = if name.is_empty() { s } else if s == "1" { name } else { format!("{s} {name}") };
        match (out.is_empty(), neg) {
            (true, false) => out.push_str(&body),
            (true, true) => out.push_str(&format!("-{body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" - {body}")),
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Prints a value with every coefficient evaluated at `q = q0`.
pub fn format_numeric(v: &Value, q0: f64) -> Result<String, CliError> {
    let terms: Vec<(String, QScalar)> = match v {
        Value::Comm(f) => f.display_terms(),
        Value::Nc(x) => x.display_terms(),
        Value::Grass(g) => {
            let names = match g.calc {
                GCalculus::Std => ["th0", "th1", "dth0", "dth1"],
                GCalculus::Hat => ["th0", "th1", "dhth0", "dhth1"],
            };
            g.terms().map(|(w, c)| (w.iter().map(|&k| names[k as usize]).collect::<Vec<_>>().join(" "), c.clone())).collect()
        }
    };
    format_numeric_terms(&terms, q0)
}

/// Numeric rendering of `(monomial, coefficient)` pairs.
pub fn format_numeric_terms(terms: &[(String, QScalar)], q0: f64) -> Result<String, CliError> {
    let mut parts = Vec::new();
    for (name, c) in terms {
        let z = c.eval_at(q0)?;
        if z.norm() > 0.0 {
            parts.push((name.clone(), z));
        }
    }
    Ok(join_numeric(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn nc(src: &str, space: Space) -> NCElement {
        parse_element(src, space).unwrap()
    }

    #[test]
    fn words_are_normal_ordered() {
        let e = Space::Euclid3;
        let r = nc("Xm Xp", e);
        assert_eq!(r, nc("Xp Xm + lambda X3^2", e));
        assert_eq!(nc("(dp)^2 X3", e), nc("dp dp X3", e));
        assert_eq!(nc("dp X3", e).to_string(), nc("q^2 X3 dp", e).to_string());
        let f = parse_function("q^2 xp x3", e).unwrap();
        assert_eq!(f.to_string(), "q^2 xp x3");
    }

    #[test]
    fn hatted_symbols_carry_their_weight() {
        let l = Space::Line;
        // the hatted derivative prints back as itself
        assert_eq!(nc("dh1", l).to_string(), "dh1");
        assert_eq!(nc("dh1 X1", l), nc("1 + q^-1 X1 dh1", l));
        assert!(evaluate(&parse("d1 dh1").unwrap(), l).is_err());
    }

    #[test]
    fn scalars_and_powers() {
        let l = Space::Line;
        let f = parse_function("(q^2 - 1)/q", l).unwrap();
        assert_eq!(f, CFunction::constant(l, QScalar::q() - QScalar::q().inv()));
        assert_eq!(parse_function("lambda", l).unwrap(), parse_function("q - q^-1", l).unwrap());
        assert_eq!(parse_function("q^(1/2) q^(1/2)", l).unwrap(), parse_function("q", l).unwrap());
        assert_eq!(nc("L^-1 L", l), nc("1", l));
        assert_eq!(nc("L^(1/2) L^(1/2)", l), nc("L", l));
        assert!(parse_function("x1^-1", l).is_err());
        assert!(parse_function("x1 / x1", l).is_err());
        assert!(parse_function("1/0", l).is_err());
        assert!(parse_function("xp", l).is_err());
        assert!(parse_function("x1", Space::Euclid3).is_err());
    }

    #[test]
    fn grassmann_elements() {
        let l = Space::Line;
        let v = evaluate(&parse("th1 th1").unwrap(), l).unwrap();
        assert_eq!(as_scalar(&v), Some(QScalar::zero()));
        assert!(evaluate(&parse("th0").unwrap(), Space::Euclid3).is_err());
    }

    #[test]
    fn numeric_printing() {
        let v = evaluate(&parse("(q + 1) x1 - 2").unwrap(), Space::Line).unwrap();
        assert_eq!(format_numeric(&v, 2.0).unwrap(), "-2 + 3 x1");
        assert_eq!(fmt_complex(Complex64::new(0.0, -2.0)), "-2i");
        assert_eq!(fmt_complex(Complex64::new(1.5, 2.0)), "(1.5+2i)");
    }
}
