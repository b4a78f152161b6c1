//! Exact coefficient field: rational functions of `q` over the Gaussian
//! rationals, with half-integer powers of `q` tracked through the variable
//! `s = q^{1/2}`.
//!
//! Canonical form of a [`QScalar`]: `num(s) / den(s)` where `num` is a Laurent
//! polynomial, `den` is an ordinary polynomial with nonzero constant term and
//! leading coefficient one, and `gcd(num, den) = 1`.  Two scalars are equal iff
//! their canonical forms are identical, so `PartialEq` is structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{QError, QResult};

/// A Gaussian rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }
    pub fn from_int(n: i64) -> Self {
        GaussRat { re: BigRational::from_integer(n.into()), im: BigRational::zero() }
    }
    pub fn from_ratio(n: i64, d: i64) -> Self {
        GaussRat { re: BigRational::new(n.into(), d.into()), im: BigRational::zero() }
    }
    pub fn i() -> Self {
        GaussRat { re: BigRational::zero(), im: BigRational::one() }
    }
    pub fn zero() -> Self {
        Self::from_int(0)
    }
    pub fn one() -> Self {
        Self::from_int(1)
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }
    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
    pub fn conj(&self) -> Self {
        GaussRat { re: self.re.clone(), im: -self.im.clone() }
    }
    pub fn inv(&self) -> Self {
        if self.im.is_zero() {
            return GaussRat { re: self.re.recip(), im: BigRational::zero() };
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        GaussRat { re: &self.re / &n, im: -(&self.im / &n) }
    }
    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(ratio_to_f64(&self.re), ratio_to_f64(&self.im))
    }
    /// Least common multiple of the denominators of both parts.
    fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a division of the parts for huge values.
        r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
    })
}

impl Add for &GaussRat {
    type Output = GaussRat;
    fn add(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}
impl Sub for &GaussRat {
    type Output = GaussRat;
    fn sub(self, o: &GaussRat) -> GaussRat {
        GaussRat { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}
impl Mul for &GaussRat {
    type Output = GaussRat;
    fn mul(self, o: &GaussRat) -> GaussRat {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussRat { re: &self.re * &o.re, im: BigRational::zero() };
        }
        GaussRat {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}
impl Neg for &GaussRat {
    type Output = GaussRat;
    fn neg(self) -> GaussRat {
        GaussRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

/// Laurent polynomial in `s` with Gaussian-rational coefficients:
/// `Σ_k c[k] s^{low+k}`.  Trimmed: the zero polynomial has empty `c`;
/// otherwise the first and last coefficients are nonzero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LPoly {
    low: i32,
    c: Vec<GaussRat>,
}

impl LPoly {
    pub fn zero() -> Self {
        LPoly { low: 0, c: Vec::new() }
    }
    pub fn constant(g: GaussRat) -> Self {
        Self::monomial(g, 0)
    }
    pub fn monomial(g: GaussRat, e: i32) -> Self {
        if g.is_zero() {
            return Self::zero();
        }
        LPoly { low: e, c: vec![g] }
    }
    fn from_parts(low: i32, c: Vec<GaussRat>) -> Self {
        let mut p = LPoly { low, c };
        p.trim();
        p
    }
    fn trim(&mut self) {
        while self.c.last().map_or(false, |x| x.is_zero()) {
            self.c.pop();
        }
        let lead_zeros = self.c.iter().take_while(|x| x.is_zero()).count();
        if lead_zeros > 0 {
            self.c.drain(..lead_zeros);
            self.low += lead_zeros as i32;
        }
        if self.c.is_empty() {
            self.low = 0;
        }
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.low == 0 && self.c.len() == 1 && self.c[0].is_one()
    }
    /// Lowest exponent present.
    pub fn low(&self) -> i32 {
        self.low
    }
    /// Highest exponent present.
    pub fn high(&self) -> i32 {
        self.low + self.c.len() as i32 - 1
    }
    pub fn coeff(&self, e: i32) -> GaussRat {
        let k = e - self.low;
        if k < 0 || k as usize >= self.c.len() {
            GaussRat::zero()
        } else {
            self.c[k as usize].clone()
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (i32, &GaussRat)> + '_ {
        self.c.iter().enumerate().filter(|(_, g)| !g.is_zero()).map(move |(k, g)| (self.low + k as i32, g))
    }
    pub fn lead(&self) -> &GaussRat {
        self.c.last().expect("lead of zero polynomial")
    }
    fn shift(&self, by: i32) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        LPoly { low: self.low + by, c: self.c.clone() }
    }
    fn scale(&self, g: &GaussRat) -> Self {
        if g.is_zero() {
            return Self::zero();
        }
        LPoly { low: self.low, c: self.c.iter().map(|x| x * g).collect() }
    }
    fn add(&self, o: &LPoly) -> LPoly {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let low = self.low.min(o.low);
        let high = self.high().max(o.high());
        let mut c = vec![GaussRat::zero(); (high - low + 1) as usize];
        for (k, x) in self.c.iter().enumerate() {
            let idx = (self.low - low) as usize + k;
            c[idx] = &c[idx] + x;
        }
        for (k, x) in o.c.iter().enumerate() {
            let idx = (o.low - low) as usize + k;
            c[idx] = &c[idx] + x;
        }
        LPoly::from_parts(low, c)
    }
    fn neg(&self) -> LPoly {
        LPoly { low: self.low, c: self.c.iter().map(|x| -x).collect() }
    }
    fn mul(&self, o: &LPoly) -> LPoly {
        if self.is_zero() || o.is_zero() {
            return LPoly::zero();
        }
        let mut c = vec![GaussRat::zero(); self.c.len() + o.c.len() - 1];
        for (i, x) in self.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in o.c.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                c[i + j] = &c[i + j] + &(x * y);
            }
        }
        LPoly::from_parts(self.low + o.low, c)
    }
    /// Polynomial division with remainder for ordinary polynomials
    /// (`low == 0` for both after normalization by the caller).
    fn divrem(&self, d: &LPoly) -> (LPoly, LPoly) {
        debug_assert!(!d.is_zero());
        if self.is_zero() {
            return (LPoly::zero(), LPoly::zero());
        }
        // Work with dense vectors starting at exponent 0.
        let a_low = self.low.min(0);
        debug_assert!(a_low == 0 && d.low >= 0);
        let mut r: Vec<GaussRat> = (0..=self.high()).map(|e| self.coeff(e)).collect();
        let dd: Vec<GaussRat> = (0..=d.high()).map(|e| d.coeff(e)).collect();
        let dn = dd.len() - 1;
        if r.len() <= dn {
            return (LPoly::zero(), self.clone());
        }
        let lead_inv = dd[dn].inv();
        let mut qc = vec![GaussRat::zero(); r.len() - dn];
        for k in (0..qc.len()).rev() {
            let coef = &r[k + dn] * &lead_inv;
            if coef.is_zero() {
                continue;
            }
            for (j, dj) in dd.iter().enumerate() {
                if !dj.is_zero() {
                    r[k + j] = &r[k + j] - &(&coef * dj);
                }
            }
            qc[k] = coef;
        }
        r.truncate(dn);
        (LPoly::from_parts(0, qc), LPoly::from_parts(0, r))
    }
    fn monic(&self) -> LPoly {
        let inv = self.lead().inv();
        self.scale(&inv)
    }
    /// Greatest common divisor of two ordinary polynomials (monic).
    fn gcd(a: &LPoly, b: &LPoly) -> LPoly {
        let mut x = a.clone();
        let mut y = b.clone();
        while !y.is_zero() {
            let (_, r) = x.divrem(&y);
            x = y;
            y = if r.is_zero() { r } else { r.monic() };
        }
        if x.is_zero() {
            x
        } else {
            x.monic()
        }
    }
    fn eval(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, g) in self.c.iter().enumerate().rev() {
            acc = acc * s + g.to_complex();
            let _ = k;
        }
        acc * s.powi(self.low)
    }
    /// `p(1/s)`.
    fn invert_var(&self) -> LPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = self.c.clone();
        c.reverse();
        LPoly { low: -self.high(), c }
    }
    fn conj(&self) -> LPoly {
        LPoly { low: self.low, c: self.c.iter().map(|g| g.conj()).collect() }
    }
    /// `p(ζ s)` for `ζ ∈ {1, -1}` raised per exponent parity: multiplies odd
    /// exponents by `-1` when `flip` is set.
    fn flip_half(&self) -> LPoly {
        LPoly {
            low: self.low,
            c: self.c.iter().enumerate().map(|(k, g)| if (self.low + k as i32).rem_euclid(2) == 1 { -g } else { g.clone() }).collect(),
        }
    }
}

/// Exact rational function of `q^{1/2}` over the Gaussian rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QScalar {
    num: LPoly,
    den: LPoly,
}

impl Default for QScalar {
    fn default() -> Self {
        QScalar::zero()
    }
}

impl QScalar {
    pub fn zero() -> Self {
        QScalar { num: LPoly::zero(), den: LPoly::constant(GaussRat::one()) }
    }
    pub fn one() -> Self {
        Self::int(1)
    }
    pub fn int(n: i64) -> Self {
        QScalar { num: LPoly::constant(GaussRat::from_int(n)), den: LPoly::constant(GaussRat::one()) }
    }
    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        QScalar { num: LPoly::constant(GaussRat::from_ratio(n, d)), den: LPoly::constant(GaussRat::one()) }
    }
    pub fn gauss(g: GaussRat) -> Self {
        QScalar { num: LPoly::constant(g), den: LPoly::constant(GaussRat::one()) }
    }
    /// The imaginary unit.
    pub fn i() -> Self {
        Self::gauss(GaussRat::i())
    }
    /// The deformation parameter `q`.
    pub fn q() -> Self {
        Self::q_pow(1)
    }
    /// `q^k` for integer `k`.
    pub fn q_pow(k: i32) -> Self {
        Self::q_half_pow(2 * k)
    }
    /// `q^{h/2}`.
    pub fn q_half_pow(h: i32) -> Self {
        QScalar { num: LPoly::monomial(GaussRat::one(), h), den: LPoly::constant(GaussRat::one()) }
    }
    /// `λ = q − q⁻¹`.
    pub fn lambda() -> Self {
        Self::q() - Self::q_pow(-1)
    }
    /// `λ₊ = q + q⁻¹`.
    pub fn lambda_plus() -> Self {
        Self::q() + Self::q_pow(-1)
    }
    /// Builds `Σ c_k s^{e_k}` from (half-exponent, integer coefficient) pairs.
    pub fn from_half_terms(terms: &[(i32, i64)]) -> Self {
        let mut acc = LPoly::zero();
        for &(e, c) in terms {
            acc = acc.add(&LPoly::monomial(GaussRat::from_int(c), e));
        }
        QScalar { num: acc, den: LPoly::constant(GaussRat::one()) }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    /// True when the denominator is trivial (a Laurent polynomial in `q^{1/2}`).
    pub fn is_laurent(&self) -> bool {
        self.den.is_one()
    }
    /// Numerator (Laurent polynomial in `s = q^{1/2}`).
    pub fn numer(&self) -> &LPoly {
        &self.num
    }
    /// Denominator (ordinary monic polynomial in `s`).
    pub fn denom(&self) -> &LPoly {
        &self.den
    }
    /// True if the scalar is an element of `ℚ(i)` (no `q` dependence).
    pub fn is_constant(&self) -> bool {
        self.den.is_one() && (self.num.is_zero() || (self.num.low == 0 && self.num.c.len() == 1))
    }
    /// Returns the Gaussian-rational value if the scalar is constant.
    pub fn as_constant(&self) -> Option<GaussRat> {
        if self.is_zero() {
            return Some(GaussRat::zero());
        }
        if self.is_constant() {
            Some(self.num.c[0].clone())
        } else {
            None
        }
    }

    fn canon(num: LPoly, den: LPoly) -> QScalar {
        assert!(!den.is_zero(), "zero denominator in canon");
        if num.is_zero() {
            return QScalar::zero();
        }
        // Move the s-power of the denominator into the numerator.
        let shift = den.low;
        let mut num = num.shift(-shift);
        let mut den = den.shift(-shift);
        if den.c.len() == 1 {
            let inv = den.c[0].inv();
            return QScalar { num: num.scale(&inv), den: LPoly::constant(GaussRat::one()) };
        }
        // Numerator as ordinary polynomial times s^low.
        let nlow = num.low;
        let n0 = num.shift(-nlow);
        let g = LPoly::gcd(&n0, &den);
        let (n1, d1) = if g.high() > 0 {
            let (qn, rn) = n0.divrem(&g);
            let (qd, rd) = den.divrem(&g);
            debug_assert!(rn.is_zero() && rd.is_zero());
            (qn, qd)
        } else {
            (n0, den)
        };
        let inv = d1.lead().inv();
        num = n1.scale(&inv).shift(nlow);
        den = d1.scale(&inv);
        if den.c.len() == 1 {
            // Degree zero after cancellation: den == 1.
            den = LPoly::constant(GaussRat::one());
        }
        QScalar { num, den }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn try_inv(&self) -> QResult<QScalar> {
        if self.is_zero() {
            return Err(QError::DivisionByZero);
        }
        Ok(QScalar::canon(self.den.clone(), self.num.clone()))
    }
    pub fn inv(&self) -> QScalar {
        self.try_inv().expect("inverse of zero QScalar")
    }
    pub fn try_div(&self, o: &QScalar) -> QResult<QScalar> {
        Ok(self * &o.try_inv()?)
    }
    /// Integer power (negative exponents invert).
    pub fn pow(&self, n: i32) -> QScalar {
        if n < 0 {
            return self.inv().pow(-n);
        }
        let mut base = self.clone();
        let mut acc = QScalar::one();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }
    /// Complex conjugation of the coefficients (`q` is real).
    pub fn conj(&self) -> QScalar {
        QScalar { num: self.num.conj(), den: self.den.conj() }
    }
    /// Substitution `q → q⁻¹` (equivalently `s → s⁻¹`).
    pub fn invert_q(&self) -> QScalar {
        QScalar::canon(self.num.invert_var(), self.den.invert_var())
    }
    /// Substitution `q^{1/2} → −q^{1/2}`; fixes every integer power of `q`.
    pub fn flip_half(&self) -> QScalar {
        QScalar::canon(self.num.flip_half(), self.den.flip_half())
    }
    /// Numerical value at `q = q0` (principal branch for `q0^{1/2}`).
    pub fn try_eval(&self, q0: Complex64) -> QResult<Complex64> {
        let s = q0.sqrt();
        let d = self.den.eval(s);
        if d.norm() < 1e-300 {
            return Err(QError::Pole(format!("{}", q0)));
        }
        if s.norm() == 0.0 && self.num.low < 0 {
            return Err(QError::Pole(format!("{}", q0)));
        }
        Ok(self.num.eval(s) / d)
    }
    pub fn eval_at(&self, q0: f64) -> QResult<Complex64> {
        self.try_eval(Complex64::new(q0, 0.0))
    }
    /// Exact value at `q = 1` (i.e. `s = 1`), the classical limit.
    pub fn at_one(&self) -> QResult<GaussRat> {
        let sum = |p: &LPoly| p.c.iter().fold(GaussRat::zero(), |a, b| &a + b);
        let d = sum(&self.den);
        if d.is_zero() {
            return Err(QError::Pole("1".into()));
        }
        Ok(&sum(&self.num) * &d.inv())
    }
    /// Exact value at an exact rational point `q = p` given as a Gaussian
    /// rational; requires all half-integer exponents to be even.
    pub fn at_rational(&self, p: &GaussRat) -> QResult<GaussRat> {
        let ev = |poly: &LPoly| -> QResult<GaussRat> {
            let mut acc = GaussRat::zero();
            for (e, c) in poly.terms() {
                if e % 2 != 0 {
                    return Err(QError::Invalid("half-integer power at rational point".into()));
                }
                let k = e / 2;
                let mut pw = GaussRat::one();
                let base = if k < 0 { p.inv() } else { p.clone() };
                for _ in 0..k.abs() {
                    pw = &pw * &base;
                }
                acc = &acc + &(c * &pw);
            }
            Ok(acc)
        };
        let d = ev(&self.den)?;
        if d.is_zero() {
            return Err(QError::Pole("rational point".into()));
        }
        Ok(&ev(&self.num)? * &d.inv())
    }
    /// Largest and smallest half-exponent of the numerator, for heuristics.
    pub fn half_degree_span(&self) -> (i32, i32) {
        (self.num.low, self.num.high())
    }
}

/// `[[n]]_{q^a} = Σ_{k=0}^{n−1} q^{ak}` as an explicit sum.
pub fn qnum(n: u32, a: i32) -> QScalar {
    let mut p = LPoly::zero();
    for k in 0..n as i32 {
        p = p.add(&LPoly::monomial(GaussRat::one(), 2 * a * k));
    }
    QScalar { num: p, den: LPoly::constant(GaussRat::one()) }
}

/// Kind of q-factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactKind {
    Plain,
    Double,
}

/// `[[n]]_{q^a}!` (plain) or `[[n]][[n−2]]…[[2]]` (double, `n` even).
pub fn qfact(n: u32, a: i32, kind: FactKind) -> QResult<QScalar> {
    match kind {
        FactKind::Plain => Ok((1..=n).fold(QScalar::one(), |acc, k| &acc * &qnum(k, a))),
        FactKind::Double => {
            if n % 2 != 0 {
                return Err(QError::Invalid(format!("double factorial needs even argument, got {n}")));
            }
            Ok((1..=n / 2).fold(QScalar::one(), |acc, k| &acc * &qnum(2 * k, a)))
        }
    }
}

/// Plain q-factorial shorthand.
pub fn qfactorial(n: u32, a: i32) -> QScalar {
    qfact(n, a, FactKind::Plain).expect("plain factorial")
}

/// Classical factorial as a scalar.
pub fn factorial(n: u32) -> QScalar {
    (1..=n as i64).fold(QScalar::one(), |acc, k| &acc * &QScalar::int(k))
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&QScalar> for &QScalar {
            type Output = QScalar;
            fn $m(self, o: &QScalar) -> QScalar {
                let f: fn(&QScalar, &QScalar) -> QScalar = $body;
                f(self, o)
            }
        }
        impl $tr<QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: QScalar) -> QScalar {
                (&self).$m(&o)
            }
        }
        impl $tr<&QScalar> for QScalar {
            type Output = QScalar;
            fn $m(self, o: &QScalar) -> QScalar {
                (&self).$m(o)
            }
        }
        impl $tr<QScalar> for &QScalar {
            type Output = QScalar;
            fn $m(self, o: QScalar) -> QScalar {
                self.$m(&o)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.den.is_one() && b.den.is_one() {
        return QScalar { num: a.num.add(&b.num), den: LPoly::constant(GaussRat::one()) };
    }
    if a.den == b.den {
        return QScalar::canon(a.num.add(&b.num), a.den.clone());
    }
    QScalar::canon(a.num.mul(&b.den).add(&b.num.mul(&a.den)), a.den.mul(&b.den))
});
forward_binop!(Sub, sub, |a, b| a + &(-b));
forward_binop!(Mul, mul, |a, b| {
    if a.is_zero() || b.is_zero() {
        return QScalar::zero();
    }
    if a.den.is_one() && b.den.is_one() {
        return QScalar { num: a.num.mul(&b.num), den: LPoly::constant(GaussRat::one()) };
    }
    QScalar::canon(a.num.mul(&b.num), a.den.mul(&b.den))
});
forward_binop!(Div, div, |a, b| a.try_div(b).expect("division by zero QScalar"));

impl Neg for &QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        QScalar { num: self.num.neg(), den: self.den.clone() }
    }
}
impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        -&self
    }
}
impl AddAssign<&QScalar> for QScalar {
    fn add_assign(&mut self, o: &QScalar) {
        *self = &*self + o;
    }
}
impl SubAssign<&QScalar> for QScalar {
    fn sub_assign(&mut self, o: &QScalar) {
        *self = &*self - o;
    }
}
impl MulAssign<&QScalar> for QScalar {
    fn mul_assign(&mut self, o: &QScalar) {
        *self = &*self * o;
    }
}
impl From<i64> for QScalar {
    fn from(n: i64) -> Self {
        QScalar::int(n)
    }
}

impl PartialOrd for QScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for QScalar {
    /// Arbitrary but total order on canonical forms (used only for
    /// deterministic output ordering).
    fn cmp(&self, other: &Self) -> Ordering {
        format!("{self}").cmp(&format!("{other}"))
    }
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

/// Clears rational denominators: returns integer (Gaussian) coefficient lists
/// for numerator and denominator with a common scale and no common content.
fn integerize(num: &LPoly, den: &LPoly) -> (Vec<(i32, BigInt, BigInt)>, Vec<(i32, BigInt, BigInt)>) {
    let mut l = BigInt::one();
    for p in [num, den] {
        for (_, g) in p.terms() {
            l = l.lcm(&g.denom_lcm());
        }
    }
    let lr = BigRational::from_integer(l);
    let conv = |p: &LPoly| -> Vec<(i32, BigInt, BigInt)> {
        p.terms()
            .map(|(e, g)| {
                let re = &g.re * &lr;
                let im = &g.im * &lr;
                (e, re.to_integer(), im.to_integer())
            })
            .collect()
    };
    let mut n = conv(num);
    let mut d = conv(den);
    let mut content = BigInt::zero();
    for (_, a, b) in n.iter().chain(d.iter()) {
        content = content.gcd(a).gcd(b);
    }
    if !content.is_zero() && !content.is_one() {
        for v in n.iter_mut().chain(d.iter_mut()) {
            v.1 = &v.1 / &content;
            v.2 = &v.2 / &content;
        }
    }
    (n, d)
}

fn fmt_q_power(e: i32) -> String {
    // e is in half units.
    if e % 2 == 0 {
        match e / 2 {
            1 => "q".to_string(),
            k => format!("q^{k}"),
        }
    } else {
        format!("q^({}/2)", e)
    }
}

/// Renders `Σ (a+bi) s^e` with descending exponents.
fn fmt_int_poly(terms: &[(i32, BigInt, BigInt)]) -> String {
    let mut ts: Vec<&(i32, BigInt, BigInt)> = terms.iter().collect();
    ts.sort_by(|x, y| y.0.cmp(&x.0));
    let mut out = String::new();
    for (idx, (e, a, b)) in ts.into_iter().enumerate() {
        let (neg, coeff): (bool, String) = if b.is_zero() {
            (a.is_negative(), a.abs().to_string())
        } else if a.is_zero() {
            let bb = b.abs();
            let s = if bb.is_one() { "i".to_string() } else { format!("{bb}i") };
            (b.is_negative(), s)
        } else {
            let im = if b.abs().is_one() { "i".to_string() } else { format!("{}i", b.abs()) };
            let sign = if b.is_negative() { "-" } else { "+" };
            (false, format!("({a}{sign}{im})"))
        };
        let body = if *e == 0 {
            coeff.clone()
        } else if coeff == "1" {
            fmt_q_power(*e)
        } else if coeff.ends_with('i') && !coeff.starts_with('(') {
            format!("({coeff}){}", fmt_q_power(*e))
        } else {
            format!("{coeff}{}", fmt_q_power(*e))
        };
        if idx == 0 {
            if neg {
                out.push('-');
            }
            out.push_str(&body);
        } else {
            out.push_str(if neg { "-" } else { "+" });
            out.push_str(&body);
        }
    }
    out
}

impl fmt::Display for QScalar {
    /// Reduced fraction of integer-coefficient polynomials in `q`, e.g.
    /// `(q^2-1)/q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // Absorb negative powers of s into the denominator.
        let (num, den) = if self.num.low < 0 {
            (self.num.shift(-self.num.low), self.den.shift(-self.num.low))
        } else {
            (self.num.clone(), self.den.clone())
        };
        let (n, mut d) = integerize(&num, &den);
        // Normalize the sign so that the denominator's leading coefficient is
        // positive.
        let mut n = n;
        if let Some(top) = d.iter().max_by_key(|t| t.0) {
            if top.1.is_negative() || (top.1.is_zero() && top.2.is_negative()) {
                for v in n.iter_mut().chain(d.iter_mut()) {
                    v.1 = -v.1.clone();
                    v.2 = -v.2.clone();
                }
            }
        }
        let ns = fmt_int_poly(&n);
        let den_is_one = d.len() == 1 && d[0].0 == 0 && d[0].1.is_one() && d[0].2.is_zero();
        if den_is_one {
            return write!(f, "{ns}");
        }
        let ds = fmt_int_poly(&d);
        let wrap = |s: &str, many: bool| if many { format!("({s})") } else { s.to_string() };
        let n_many = n.len() > 1 || ns.starts_with('-');
        let d_many = d.len() > 1 || ds.contains('(') || (d.len() == 1 && d[0].0 != 0 && !d[0].1.is_one());
        if ns.starts_with('-') && n.len() == 1 {
            write!(f, "-{}/{}", &ns[1..], wrap(&ds, d_many))
        } else {
            write!(f, "{}/{}", wrap(&ns, n_many), wrap(&ds, d_many))
        }
    }
}

impl fmt::Display for GaussRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", QScalar::gauss(self.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> QScalar {
        QScalar::q()
    }

    #[test]
    fn lambda_times_lambda_plus() {
        let lhs = QScalar::lambda() * QScalar::lambda_plus();
        let rhs = q().pow(2) - q().pow(-2);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cancellation_and_identity() {
        let one_plus_q = QScalar::one() + q();
        assert!((one_plus_q.clone() / one_plus_q.clone()).is_one());
        assert_eq!(one_plus_q.clone() + QScalar::zero(), one_plus_q);
    }

    #[test]
    fn rational_function_cancellation() {
        // (q^2 - 1)/(q - 1) = q + 1
        let a = q().pow(2) - QScalar::one();
        let b = q() - QScalar::one();
        assert_eq!(a / b, q() + QScalar::one());
    }

    #[test]
    fn qnum_examples() {
        assert!(qnum(0, 1).is_zero());
        assert_eq!(qnum(2, 1), QScalar::one() + q());
        assert_eq!(qnum(3, 2), QScalar::one() + q().pow(2) + q().pow(4));
    }

    #[test]
    fn qfact_examples() {
        assert!(qfact(0, 1, FactKind::Plain).unwrap().is_one());
        assert_eq!(qfact(2, 1, FactKind::Plain).unwrap(), QScalar::one() + q());
        let expect = (QScalar::one() + q().pow(2)) * (QScalar::one() + q().pow(2) + q().pow(4) + q().pow(6));
        assert_eq!(qfact(4, 2, FactKind::Double).unwrap(), expect);
        assert!(qfact(3, 2, FactKind::Double).is_err());
    }

    #[test]
    fn eval_examples() {
        assert!(QScalar::lambda().eval_at(1.0).unwrap().norm() < 1e-15);
        assert!((qnum(3, 1).eval_at(1.0).unwrap().re - 3.0).abs() < 1e-15);
        assert!((qnum(2, 1).eval_at(1.1).unwrap().re - 2.1).abs() < 1e-12);
        let pole = QScalar::one() / (q() - QScalar::one());
        assert!(matches!(pole.eval_at(1.0), Err(QError::Pole(_))));
    }

    #[test]
    fn qnum_geometric_identity() {
        for n in 1..8u32 {
            for a in [-4, -3, -2, -1, 1, 2, 3, 4] {
                let lhs = qnum(n, a) * (QScalar::one() - q().pow(a));
                let rhs = QScalar::one() - q().pow(a * n as i32);
                assert_eq!(lhs, rhs, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn classical_limit_of_qnum() {
        for n in 0..=20u32 {
            for a in [-4, -3, -2, -1, 1, 2, 3, 4] {
                assert_eq!(qnum(n, a).at_one().unwrap(), GaussRat::from_int(n as i64));
            }
        }
    }

    #[test]
    fn printing() {
        let x = (q().pow(2) - QScalar::one()) / q();
        assert_eq!(x.to_string(), "(q^2-1)/q");
        assert_eq!(QScalar::ratio(1, 2).to_string(), "1/2");
        assert_eq!((QScalar::one() / (QScalar::one() + q())).to_string(), "1/(q+1)");
        assert_eq!(QScalar::i().to_string(), "i");
        assert_eq!(QScalar::q_half_pow(1).to_string(), "q^(1/2)");
        assert_eq!((-q()).to_string(), "-q");
        assert_eq!(q().pow(-2).to_string(), "1/q^2");
    }

    #[test]
    fn half_powers_square_to_q() {
        let s = QScalar::q_half_pow(1);
        assert_eq!(&s * &s, q());
        assert_eq!(s.flip_half() + QScalar::q_half_pow(1), QScalar::zero());
    }

    #[test]
    fn invert_q_is_involution() {
        let x = (q().pow(3) + QScalar::int(2)) / (QScalar::one() + q());
        assert_eq!(x.invert_q().invert_q(), x);
        assert_eq!(QScalar::lambda().invert_q(), -QScalar::lambda());
    }
}
