//! q-translations (⊕), antipodes (⊖) and the q-Taylor rules tying
//! exponentials, translations and actions together.
//!
//! Two-leg functions put the first argument `x` in variables `0..d` and the
//! second argument `y` in `d..2d`.

use std::collections::BTreeMap;

use crate::error::QResult;
use crate::ncalgebra::{reorder_transform, ActMode, ReorderDir};
use crate::pairexp::{qexp, ExpKind};
use crate::qfunc::{act_partial_closed, jackson_d, partial, CFunction, CMono};
use crate::qscalar::{factorial, qfact, qfactorial, FactKind, QScalar};
use crate::report::VerificationReport;
use crate::space::Space;
use crate::starcalc::{star, StarContext, StarOrdering};

/// Translation/antipode variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HopfVariant {
    /// `⊕_L`, `⊖_L` (3D: on functions read through W̃)
    L,
    /// `⊕_L̄`, `⊖_L̄` (3D: on functions read through W)
    LBar,
}

impl HopfVariant {
    pub fn parse(s: &str) -> Option<HopfVariant> {
        match s {
            "L" | "l" => Some(HopfVariant::L),
            "Lbar" | "LBar" | "lbar" => Some(HopfVariant::LBar),
            _ => None,
        }
    }
}

const XP: usize = 1;
const X3: usize = 2;
const XM: usize = 3;

/// `S`: interchange `±` and send `q → 1/q`; conjugating an operator formula
/// with `S` realizes the tabulated transition between the `L̄` and `L` variants.
fn s_map(f: &CFunction) -> CFunction {
    f.swap_pm().invert_q()
}

/// `f(x ⊕ y)` for the chosen variant.
pub fn translate(space: Space, variant: HopfVariant, f: &CFunction) -> CFunction {
    match (space, variant) {
        (Space::Line, HopfVariant::LBar) => translate_line(f, 1),
        (Space::Line, HopfVariant::L) => translate_line(f, -1),
        (Space::Euclid3, HopfVariant::LBar) => translate_3d(f),
        (Space::Euclid3, HopfVariant::L) => s_map(&translate_3d(&s_map(f))),
    }
}

/// `Σ (x⁰)^k (x¹)^l/(k! [[l]]_{q^a}!) ∂₀^k (D¹_{q^a})^l f(y)`.
fn translate_line(f: &CFunction, a: i32) -> CFunction {
    let mut out = CFunction::zero_legs(Space::Line, 2);
    let mut dk = f.clone();
    for k in 0..=f.degree_in(0) {
        let mut dl = dk.clone();
        for l in 0..=f.degree_in(1) {
            if dl.is_zero() {
                break;
            }
            let c = (factorial(k as u32) * qfactorial(l as u32, a)).inv();
            let mut m = [0u16; 8];
            m[0] = k;
            m[1] = l;
            out = out.add(&dl.to_second_leg().with_legs(2).mul_mono(&m, &c));
            dl = jackson_d(&dl, 1, a);
        }
        dk = partial(&dk, 0);
    }
    out
}

/// The 3D `⊕_L̄` formula: sum over `k₀, k₊, k₃, k₋` and `0 ≤ l ≤ k₃` of
/// `(qλλ₊)^l (x⁰)^{k₀}(x⁺)^{k₊}(x³)^{k₃−l}(x⁻)^{k₋+l}(y⁺)^l /
/// (k₀! [[2l]]_{q²}!! [[k₊]]_{q⁴}! [[k₃−l]]_{q²}! [[k₋]]_{q⁴}!)` times
/// `(D⁴₊)^{k₊}(D²₃)^{k₃+l}(D⁴₋)^{k₋}∂₀^{k₀} f` at `(q^{2(k₃−l)}y⁺, q^{2k₋}y³)`.
fn translate_3d(f: &CFunction) -> CFunction {
    let sp = Space::Euclid3;
    let mut out = CFunction::zero_legs(sp, 2);
    let base = QScalar::q() * QScalar::lambda() * QScalar::lambda_plus();
    let mut d0 = f.clone();
    for k0 in 0..=f.degree_in(0) {
        let mut dm = d0.clone();
        for km in 0..=f.degree_in(XM) {
            let mut dp = dm.clone();
            for kp in 0..=f.degree_in(XP) {
                let mut d3 = dp.clone();
                // d3 = (D²₃)^{j} dp with j = k₃ + l
                for j in 0..=f.degree_in(X3) {
                    if d3.is_zero() {
                        break;
                    }
                    for l in 0..=j / 2 {
                        let k3 = j - l;
                        let c = base.pow(l as i32)
                            / (factorial(k0 as u32)
                                * qfact(2 * l as u32, 2, FactKind::Double).expect("even")
                                * qfactorial(kp as u32, 4)
                                * qfactorial((k3 - l) as u32, 2)
                                * qfactorial(km as u32, 4));
                        let g = d3.to_second_leg().with_legs(2).scale_var(4 + XP, 4 * (k3 as i32 - l as i32)).scale_var(4 + X3, 4 * km as i32);
                        let mut m = [0u16; 8];
                        m[0] = k0;
                        m[XP] = kp;
                        m[X3] = k3 - l;
                        m[XM] = km + l;
                        m[4 + XP] = l;
                        out = out.add(&g.mul_mono(&m, &c));
                    }
                    d3 = jackson_d(&d3, X3, 2);
                }
                dp = jackson_d(&dp, XP, 4);
                if dp.is_zero() {
                    break;
                }
            }
            dm = jackson_d(&dm, XM, 4);
            if dm.is_zero() {
                break;
            }
        }
        d0 = partial(&d0, 0);
        if d0.is_zero() {
            break;
        }
    }
    out
}

/// The tabulated 3D antipode formula: returns `Û(f(⊖_L̄ x))` for `f` read
/// through W.
pub fn antipode_closed_form_3d(f: &CFunction) -> CFunction {
    antipode_formula_3d(f, ANTIPODE_EXPONENT)
}

/// Coefficients `(a, b, c, d, e)` of the n̂-dependent exponent
/// `a(n̂₊² + n̂₋²) + b(n̂₊ + n̂₋) + c n̂₃(n̂₊ + n̂₋) + d n̂₃² + e n̂₃`, i.e.
/// `2n̂₊(n̂₊−1) + 2n̂₋(n̂₋−1) + n̂₃(2n̂₊ + 2n̂₋ + n̂₃ − 1)`. This is the unique
/// member of the family satisfying the antipode axiom together with the
/// translation formula (`⊖x⁺ = −x⁺`, as `S(X⁺) = −Λ^{−1/2}τ^{1/2}X⁺` requires).
pub const ANTIPODE_EXPONENT: [i32; 5] = [2, -2, 2, 1, -1];

#[doc(hidden)]
pub fn antipode_formula_3d(f: &CFunction, ex: [i32; 5]) -> CFunction {
    let mut out = CFunction::zero(Space::Euclid3);
    let base = QScalar::q_pow(-1) * QScalar::lambda() * QScalar::lambda_plus();
    let kmax = f.degree_in(X3) / 2;
    for k in 0..=kmax as i32 {
        // f(−x⁰, −x⁺, −q^{−2k}x³, −x⁻) followed by the n̂-dependent factor
        let g = f.map_terms(|e, c| {
            let deg: u32 = e.iter().map(|&v| v as u32).sum();
            let sign = if deg % 2 == 0 { 1 } else { -1 };
            let (np, n3, nm) = (e[XP] as i32, e[X3] as i32, e[XM] as i32);
            let pw = -2 * k * n3 + ex[0] * (np * np + nm * nm) + ex[1] * (np + nm) + ex[2] * n3 * (np + nm) + ex[3] * n3 * n3 + ex[4] * n3;
            CFunction::monomial(Space::Euclid3, *e, c * QScalar::int(sign) * QScalar::q_pow(pw))
        });
        let mut h = g;
        for _ in 0..2 * k {
            h = jackson_d(&h, X3, 2);
        }
        let c = base.pow(k) * QScalar::q_pow(4 * k * k) / qfact(2 * k as u32, 2, FactKind::Double).expect("even");
        let mut m = [0u16; 8];
        m[XP] = k as u16;
        m[XM] = k as u16;
        out = out.add(&h.mul_mono(&m, &c));
    }
    out
}

/// `f(⊖x)` for the chosen variant.
pub fn antipode(space: Space, variant: HopfVariant, f: &CFunction) -> CFunction {
    match (space, variant) {
        (Space::Line, HopfVariant::L) => antipode_line(f, -1),
        (Space::Line, HopfVariant::LBar) => antipode_line(f, 1),
        (Space::Euclid3, HopfVariant::LBar) => reorder_transform(&antipode_closed_form_3d(f), ReorderDir::ToStandard),
        // transition: Û(f(⊖_L̄x)) ↔ Û⁻¹(f̃(⊖_L x))
        (Space::Euclid3, HopfVariant::L) => {
            reorder_transform(&s_map(&antipode_closed_form_3d(&s_map(f))), ReorderDir::ToReversed)
        }
    }
}

/// `q^{±½ n̂₁(n̂₁−1)} f(−x)`.
fn antipode_line(f: &CFunction, sign: i32) -> CFunction {
    f.map_terms(|e, c| {
        let n = e[1] as i32;
        let deg = e[0] as i32 + n;
        let s = if deg % 2 == 0 { 1 } else { -1 };
        CFunction::monomial(Space::Line, *e, c * QScalar::int(s) * QScalar::q_half_pow(sign * n * (n - 1)))
    })
}

/// Groups a two-leg function by its first-leg monomial; the second-leg parts
/// are returned as one-leg functions.
fn split_legs(f: &CFunction) -> BTreeMap<CMono, CFunction> {
    let d = f.space.dim();
    let mut out: BTreeMap<CMono, CFunction> = BTreeMap::new();
    for (e, c) in f.terms() {
        let mut x = [0u16; 8];
        let mut y = [0u16; 8];
        x[..d].copy_from_slice(&e[..d]);
        y[..d].copy_from_slice(&e[d..2 * d]);
        out.entry(x).or_insert_with(|| CFunction::zero(f.space)).add_term(y, c.clone());
    }
    out
}

fn join_legs(space: Space, parts: impl IntoIterator<Item = (CMono, CFunction)>) -> CFunction {
    let d = space.dim();
    let mut out = CFunction::zero_legs(space, 2);
    for (x, g) in parts {
        for (y, c) in g.terms() {
            let mut e = x;
            for i in 0..d {
                e[d + i] = y[i];
            }
            out.add_term(e, c.clone());
        }
    }
    out
}

/// Applies a one-leg map to the second leg of a two-leg function.
fn map_second_leg(f: &CFunction, m: impl Fn(&CFunction) -> CFunction) -> CFunction {
    join_legs(f.space, split_legs(f).into_iter().map(|(x, g)| (x, m(&g))))
}

/// `f(x ⊕ (⊖y))`: translation followed by the antipode on the second leg.
pub fn translate_neg(space: Space, variant: HopfVariant, f: &CFunction) -> CFunction {
    map_second_leg(&translate(space, variant, f), |g| antipode(space, variant, g))
}

/// `f((⊖y) ⊕ x)` for the right-handed structures, obtained by mirroring the
/// left ones with σ (`X⁺ ↔ X⁻`, products reversed): the `R` structures mirror
/// `L̄`, the `R̄` structures mirror `L`. Variables are laid out as in
/// [`translate_neg`] (`x` first leg, `y` second leg).
pub fn neg_translate_right(space: Space, mirror_of: HopfVariant, f: &CFunction) -> CFunction {
    translate_neg(space, mirror_of, &f.swap_pm()).swap_pm()
}

/// Classical Taylor shift in the time variable: `g(x⁰ + t₀, …)`.
pub fn time_taylor(g: &CFunction, t0: &QScalar) -> CFunction {
    let mut out = CFunction::zero(g.space).with_legs(g.nvars / g.space.dim());
    let mut d = g.clone();
    let mut k = 0u32;
    while !d.is_zero() {
        out = out.add(&d.scale(&(t0.pow(k as i32) / factorial(k))));
        d = partial(&d, 0);
        k += 1;
    }
    out
}

/// The four q-Taylor rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaylorRule {
    /// `exp(x ⊕_L̄ (⊖_L̄ y)|∂)_{R̄,L} ▷ g(y) = g(x)`
    Left,
    /// `exp(x ⊕_L (⊖_L y)|∂̂)_{R,L̄} ▷̄ g(y) = g(x)`
    LeftHat,
    /// `g(y) ◁̄ exp(∂|(⊖_R y) ⊕_R x)_{R̄,L} = g(x)`
    RightHat,
    /// `g(y) ◁ exp(∂̂|(⊖_R̄ y) ⊕_R̄ x)_{R,L̄} = g(x)`
    Right,
}

impl TaylorRule {
    pub const ALL: [TaylorRule; 4] = [TaylorRule::Left, TaylorRule::LeftHat, TaylorRule::RightHat, TaylorRule::Right];
    fn parts(self) -> (ExpKind, HopfVariant, StarOrdering) {
        match self {
            TaylorRule::Left => (ExpKind::CoordDeriv, HopfVariant::LBar, StarOrdering::Standard),
            TaylorRule::LeftHat => (ExpKind::CoordDerivHat, HopfVariant::L, StarOrdering::Reversed),
            TaylorRule::RightHat => (ExpKind::DerivCoord, HopfVariant::LBar, StarOrdering::Standard),
            TaylorRule::Right => (ExpKind::DerivCoordHat, HopfVariant::L, StarOrdering::Reversed),
        }
    }
    pub fn mode(self) -> ActMode {
        self.parts().0.mode()
    }
}

/// Left side of a Taylor rule evaluated on the polynomial `g`, as a two-leg
/// function (it equals `g(x)` with no `y` dependence when the rule holds).
pub fn taylor_apply(space: Space, rule: TaylorRule, g: &CFunction) -> QResult<CFunction> {
    let (kind, variant, ord) = rule.parts();
    let mode = kind.mode();
    let ctx = StarContext::new(space, ord);
    let e = qexp(space, kind, g.total_degree());
    let mut acc = CFunction::zero_legs(space, 2);
    for t in &e.terms {
        let mut h = g.clone();
        if mode.is_left() {
            for &i in t.derivs.iter().rev() {
                h = act_partial_closed(space, mode, i, &h)?;
            }
        } else {
            for &i in &t.derivs {
                h = act_partial_closed(space, mode, i, &h)?;
            }
        }
        if h.is_zero() {
            continue;
        }
        let coord = CFunction::monomial(space, t.coord, t.coeff.clone());
        let term = if mode.is_left() {
            map_second_leg(&translate_neg(space, variant, &coord), |y| star(ctx, y, &h))
        } else {
            map_second_leg(&neg_translate_right(space, variant, &coord), |y| star(ctx, &h, y))
        };
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// Checks a Taylor rule on every monomial of total degree ≤ `max_degree`.
pub fn taylor_identity_check(space: Space, rule: TaylorRule, max_degree: u32) -> VerificationReport {
    let mut rep = VerificationReport::new(format!("hopf-taylor:{rule:?}"), space.name());
    for m in crate::qfunc::monomials_up_to(space.dim(), max_degree) {
        let g = CFunction::monomial(space, m, QScalar::one());
        match taylor_apply(space, rule, &g) {
            Ok(lhs) => {
                let rhs = g.clone().with_legs(2);
                if lhs != rhs {
                    rep.fail(g.to_string(), lhs, rhs);
                }
            }
            Err(err) => rep.fail(g.to_string(), err, "g(x)"),
        }
    }
    if space == Space::Euclid3 {
        rep.note("translation formula: the undefined double-factorial index is read as [[2l]]_{q^2}!! with l the inner summation index");
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(space: Space, e: &[u16]) -> CFunction {
        let mut m = [0u16; 8];
        m[..e.len()].copy_from_slice(e);
        CFunction::monomial(space, m, QScalar::one())
    }

    #[test]
    fn line_translation_and_antipode() {
        let l = Space::Line;
        let t = translate(l, HopfVariant::L, &mono(l, &[0, 2]));
        let want = mono(l, &[0, 0, 0, 2])
            .add(&mono(l, &[0, 1, 0, 1]).scale(&(QScalar::one() + QScalar::q_pow(-1))))
            .add(&mono(l, &[0, 2, 0, 0]));
        assert_eq!(t, want);
        assert_eq!(antipode(l, HopfVariant::L, &mono(l, &[0, 1])), mono(l, &[0, 1]).neg());
        assert_eq!(antipode(l, HopfVariant::L, &mono(l, &[0, 2])), mono(l, &[0, 2]).scale(&QScalar::q_pow(-1)));
        let c = CFunction::constant(l, QScalar::int(3));
        assert_eq!(antipode(l, HopfVariant::LBar, &c), c);
    }

    #[test]
    fn euclid_translation_example() {
        let e = Space::Euclid3;
        let t = translate(e, HopfVariant::LBar, &mono(e, &[0, 1]));
        assert_eq!(t, mono(e, &[0, 0, 0, 0, 0, 1]).add(&mono(e, &[0, 1])));
    }

    #[test]
    fn time_shift() {
        let l = Space::Line;
        let g = mono(l, &[2]);
        let want = g.add(&mono(l, &[1]).scale(&QScalar::int(2))).add(&CFunction::one(l));
        assert_eq!(time_taylor(&g, &QScalar::one()), want);
        let s = mono(l, &[0, 3]);
        assert_eq!(time_taylor(&s, &QScalar::int(7)), s);
    }

    #[test]
    fn taylor_line_small() {
        for rule in TaylorRule::ALL {
            let r = taylor_identity_check(Space::Line, rule, 2);
            assert!(r.passed(), "{rule:?}: {:?}", r.failures);
        }
    }
}
