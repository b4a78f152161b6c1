//! Star-product properties on the 3D space.

use qspace_core::ncalgebra::{reorder_transform, ReorderDir};
use qspace_core::qfunc::{monomials_up_to, CFunction};
use qspace_core::starcalc::{star, star_oracle_check, StarContext, StarOrdering};
use qspace_core::{QScalar, Space};

const E: Space = Space::Euclid3;

fn deg(m: &[u16; 8]) -> u32 {
    m.iter().map(|&k| k as u32).sum()
}

fn mono(m: [u16; 8]) -> CFunction {
    CFunction::monomial(E, m, QScalar::one())
}

#[test]
fn closed_formula_matches_engine_through_degree_4() {
    for space in [Space::Line, Space::Euclid3] {
        let r = star_oracle_check(space, 4);
        assert!(r.passed(), "{:?}", r.failures);
    }
}

#[test]
fn associative_on_triples() {
    let ms = monomials_up_to(4, 4);
    for ord in [StarOrdering::Standard, StarOrdering::Reversed] {
        let ctx = StarContext::new(E, ord);
        for a in &ms {
            for b in &ms {
                for c in &ms {
                    if deg(a) + deg(b) + deg(c) > 4 {
                        continue;
                    }
                    let (f, g, h) = (mono(*a), mono(*b), mono(*c));
                    let l = star(ctx, &star(ctx, &f, &g), &h);
                    let r = star(ctx, &f, &star(ctx, &g, &h));
                    assert_eq!(l, r, "{ord:?} ({f})({g})({h})");
                }
            }
        }
    }
}

#[test]
fn time_is_central() {
    let t = CFunction::var(E, 0);
    for ord in [StarOrdering::Standard, StarOrdering::Reversed] {
        let ctx = StarContext::new(E, ord);
        for m in monomials_up_to(4, 3) {
            let f = mono(m);
            assert_eq!(star(ctx, &t, &f), t.mul(&f));
            assert_eq!(star(ctx, &f, &t), t.mul(&f));
        }
    }
}

#[test]
fn classical_limit_is_commutative_product() {
    let ms = monomials_up_to(4, 4);
    let ctx = StarContext::new(E, StarOrdering::Standard);
    for a in &ms {
        for b in &ms {
            if deg(a) + deg(b) > 4 {
                continue;
            }
            let (f, g) = (mono(*a), mono(*b));
            assert_eq!(star(ctx, &f, &g).at_one().unwrap(), f.mul(&g).at_one().unwrap());
        }
    }
}

#[test]
fn orderings_intertwined_by_reorder_map() {
    let ms = monomials_up_to(4, 3);
    let std = StarContext::new(E, StarOrdering::Standard);
    let rev = StarContext::new(E, StarOrdering::Reversed);
    for a in &ms {
        for b in &ms {
            if deg(a) + deg(b) > 3 {
                continue;
            }
            let (f, g) = (mono(*a), mono(*b));
            let u = |h: &CFunction| reorder_transform(h, ReorderDir::ToReversed);
            assert_eq!(star(rev, &u(&f), &u(&g)), u(&star(std, &f, &g)));
        }
    }
}
