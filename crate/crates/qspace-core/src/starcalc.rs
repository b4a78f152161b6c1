//! Star products: the noncommutative coordinate product pulled back to
//! commutative polynomials through the ordering isomorphisms W and W̃.

use rayon::prelude::*;

use crate::ncalgebra::{Calculus, NCElement, Ordering};
use crate::qfunc::{jackson_d, monomials_up_to, CFunction};
use crate::qscalar::{qfactorial, QScalar};
use crate::report::VerificationReport;
use crate::space::Space;

/// Which ordering isomorphism the star product refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarOrdering {
    /// W: `X⁰X⁺X³X⁻`
    Standard,
    /// W̃: `X⁰X⁻X³X⁺`
    Reversed,
}

impl StarOrdering {
    pub fn ordering(self) -> Ordering {
        match self {
            StarOrdering::Standard => Ordering::STD,
            StarOrdering::Reversed => Ordering::REV,
        }
    }
}

/// Space and ordering of a star product. Sums terminate on polynomials, so no
/// truncation parameter is needed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StarContext {
    pub space: Space,
    pub ordering: StarOrdering,
}

impl StarContext {
    pub fn new(space: Space, ordering: StarOrdering) -> Self {
        StarContext { space, ordering }
    }
}

const XP: usize = 1;
const X3: usize = 2;
const XM: usize = 3;

/// `f ⋆ g` by the closed formula (3D) or the commutative product (line, whose
/// coordinates commute).
pub fn star(ctx: StarContext, f: &CFunction, g: &CFunction) -> CFunction {
    if ctx.space == Space::Line {
        return f.mul(g);
    }
    // Standard: Σ λ^k (x3)^{2k}/[[k]]_{q⁴}! q^{2(n3 n_{y+} + n− n_{y3})} (D⁴₋)^k f (D⁴₊)^k g.
    // Reversed: Σ (−λ)^k (x3)^{2k}/[[k]]_{q⁻⁴}! q^{−2(n+ n_{y3} + n3 n_{y−})} (D⁻⁴₊)^k f (D⁻⁴₋)^k g,
    // i.e. the standard formula with ± interchanged throughout.
    let (sign, a, fv, gv): (i32, i32, usize, usize) = match ctx.ordering {
        StarOrdering::Standard => (1, 4, XM, XP),
        StarOrdering::Reversed => (-1, -4, XP, XM),
    };
    let lam = QScalar::lambda() * QScalar::int(sign as i64);
    let kmax = f.degree_in(fv).min(g.degree_in(gv));
    let mut out = CFunction::zero(Space::Euclid3);
    let mut df = f.clone();
    let mut dg = g.clone();
    for k in 0..=kmax as u32 {
        let pre = lam.pow(k as i32) / qfactorial(k, a);
        for (ef, cf) in df.terms() {
            for (eg, cg) in dg.terms() {
                let pw = sign * 2 * (ef[X3] as i32 * eg[gv] as i32 + ef[fv] as i32 * eg[X3] as i32);
                let mut e = *ef;
                for v in 0..4 {
                    e[v] += eg[v];
                }
                e[X3] += 2 * k as u16;
                out.add_term(e, &pre * cf * cg * QScalar::q_pow(pw));
            }
        }
        df = jackson_d(&df, fv, a);
        dg = jackson_d(&dg, gv, a);
    }
    out
}

/// `W⁻¹(W(f)·W(g))` computed with the rewriting engine.
pub fn star_via_algebra(ctx: StarContext, f: &CFunction, g: &CFunction) -> CFunction {
    let ord = ctx.ordering.ordering();
    let a = NCElement::from_cfunction(f, Calculus::Std, ord);
    let b = NCElement::from_cfunction(g, Calculus::Std, ord);
    a.mul(&b).expect("same space").to_ordering(ord).to_cfunction().expect("coordinates only")
}

/// Compares the closed formula with the rewriting engine on all monomial
/// pairs of total degree ≤ `max_degree`, in both orderings.
pub fn star_oracle_check(space: Space, max_degree: u32) -> VerificationReport {
    let mut rep = VerificationReport::new("star", space.name());
    let n = space.dim();
    let monos = monomials_up_to(n, max_degree);
    let mut pairs = Vec::new();
    for ord in [StarOrdering::Standard, StarOrdering::Reversed] {
        for a in &monos {
            for b in &monos {
                let da: u32 = a.iter().map(|&k| k as u32).sum();
                let db: u32 = b.iter().map(|&k| k as u32).sum();
                if da + db <= max_degree {
                    pairs.push((ord, *a, *b));
                }
            }
        }
    }
    let bad: Vec<(String, String, String)> = pairs
        .par_iter()
        .filter_map(|&(ord, a, b)| {
            let ctx = StarContext::new(space, ord);
            let f = CFunction::monomial(space, a, QScalar::one());
            let g = CFunction::monomial(space, b, QScalar::one());
            let lhs = star(ctx, &f, &g);
            let rhs = star_via_algebra(ctx, &f, &g);
            (lhs != rhs).then(|| (format!("{ord:?}: ({f}) * ({g})"), lhs.to_string(), rhs.to_string()))
        })
        .collect();
    for (i, l, r) in bad {
        rep.fail(i, l, r);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u16]) -> CFunction {
        let mut x = [0u16; 8];
        x[..e.len()].copy_from_slice(e);
        CFunction::monomial(Space::Euclid3, x, QScalar::one())
    }

    #[test]
    fn examples() {
        let ctx = StarContext::new(Space::Euclid3, StarOrdering::Standard);
        let g = m(&[1, 2, 0, 1]);
        assert_eq!(star(ctx, &CFunction::one(Space::Euclid3), &g), g);
        assert_eq!(star(ctx, &m(&[0, 0, 0, 1]), &m(&[0, 1, 0, 0])), m(&[0, 1, 0, 1]).add(&m(&[0, 0, 2, 0]).scale(&QScalar::lambda())));
        assert_eq!(star(ctx, &m(&[0, 0, 1, 0]), &m(&[0, 1, 0, 0])), m(&[0, 1, 1, 0]).scale(&QScalar::q_pow(2)));
    }

    #[test]
    fn oracle_small() {
        for space in [Space::Line, Space::Euclid3] {
            assert!(star_oracle_check(space, 0).passed());
            let r = star_oracle_check(space, 3);
            assert!(r.passed(), "{:?}", r.failures);
        }
    }
}
