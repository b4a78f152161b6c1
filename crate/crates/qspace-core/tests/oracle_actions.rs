//! Counit-procedure actions agree with the closed-form representations.

use qspace_core::ncalgebra::{act_cf, action_symbol_word, ActMode};
use qspace_core::qfunc::{act_inverse_partial, act_partial_closed, monomials_up_to, CFunction};
use qspace_core::{QScalar, Space};

fn check_space(space: Space, max_deg: u32) {
    let n = space.dim();
    let mut failures = Vec::new();
    for mode in ActMode::ALL {
        for i in 0..n {
            let d = action_symbol_word(space, mode, &[i]);
            for m in monomials_up_to(n, max_deg) {
                let f = CFunction::monomial(space, m, QScalar::one());
                let a = act_cf(&d, &f, mode).unwrap();
                let b = act_partial_closed(space, mode, i, &f).unwrap();
                if a != b {
                    failures.push(format!("{} d{} on {}: counit {} vs closed {}", mode.name(), i, f, a, b));
                }
            }
        }
    }
    assert!(failures.is_empty(), "{} mismatches:\n{}", failures.len(), failures[..failures.len().min(400)].join("\n"));
}

#[test]
fn line_actions_match_closed_forms() {
    check_space(Space::Line, 6);
}

#[test]
fn euclid3_actions_match_closed_forms() {
    check_space(Space::Euclid3, 4);
}

#[test]
fn inverses_invert_closed_forms() {
    for space in [Space::Line, Space::Euclid3] {
        let n = space.dim();
        for mode in ActMode::ALL {
            for i in 0..n {
                for m in monomials_up_to(n, 4) {
                    let f = CFunction::monomial(space, m, QScalar::one());
                    let g = act_inverse_partial(space, mode, i, &f).unwrap();
                    let back = act_partial_closed(space, mode, i, &g).unwrap();
                    assert_eq!(back, f, "{} inverse d{} on {}", mode.name(), i, f);
                }
            }
        }
    }
}
