//! Seeded random round trips through the expression printer, and exit-code
//! behaviour of the `qspace` binary.

use std::process::Command;

use qspace::eval::evaluate;
use qspace::{parse, print};
use qspace_core::Space;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const COMM: &[&str] = &["x0", "x1", "xp", "x3", "xm"];
const EUCLID_NC: &[&str] = &["Xp", "X3", "Xm", "dp", "d3", "dm", "L"];
const SCALARS: &[&str] = &["q", "i", "lambda", "2", "3"];

fn atom(rng: &mut ChaCha8Rng, vars: &[&str]) -> String {
    let pool = if rng.gen_bool(0.3) { SCALARS } else { vars };
    let a = pool[rng.gen_range(0..pool.len())].to_string();
    match rng.gen_range(0..6) {
        0 => format!("{a}^{}", rng.gen_range(1..4)),
        1 if a == "q" => format!("q^(-{}/2)", rng.gen_range(1..4)),
        _ => a,
    }
}

fn random_expr(rng: &mut ChaCha8Rng, vars: &[&str], depth: u32) -> String {
    let terms = rng.gen_range(1..4);
    let mut out = String::new();
    for k in 0..terms {
        if k > 0 || rng.gen_bool(0.2) {
            out.push_str(if rng.gen_bool(0.5) { " + " } else { " - " });
        }
        let factors = rng.gen_range(1..4);
        for j in 0..factors {
            if j > 0 {
                out.push_str(if rng.gen_bool(0.5) { " " } else { " * " });
            }
            if depth > 0 && rng.gen_bool(0.2) {
                out.push_str(&format!("({})", random_expr(rng, vars, depth - 1)));
            } else {
                out.push_str(&atom(rng, vars));
            }
        }
    }
    out
}

#[test]
fn printing_is_idempotent_and_value_preserving() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for (space, vars) in [(Space::Line, COMM), (Space::Euclid3, EUCLID_NC), (Space::Euclid3, COMM)] {
        for _ in 0..150 {
            let src = random_expr(&mut rng, vars, 2);
            let e = parse(&src).unwrap_or_else(|err| panic!("'{src}': {err}"));
            let p = print(&e);
            let e2 = parse(&p).unwrap_or_else(|err| panic!("'{p}': {err}"));
            assert_eq!(print(&e2), p, "reprint of '{src}'");
            let (v1, v2) = (evaluate(&e, space), evaluate(&e2, space));
            assert_eq!(v1.is_ok(), v2.is_ok(), "'{src}' vs '{p}'");
            if let (Ok(v1), Ok(v2)) = (v1, v2) {
                assert_eq!(v1, v2, "value of '{src}' changed by printing");
            }
        }
    }
}

fn qspace(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qspace")).args(args).output().expect("run qspace");
    (
        out.status.code(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn nf_prints_the_normal_ordered_commutator() {
    let (code, stdout, _) = qspace(&["--space", "euclid3", "nf", "Xm Xp"]);
    assert_eq!(code, Some(0));
    assert!(stdout.contains("Xp Xm") && stdout.contains("X3^2"), "{stdout}");
}

#[test]
fn mixed_variable_kinds_exit_with_a_caret() {
    let (code, _, stderr) = qspace(&["nf", "X1 + x1"]);
    assert_eq!(code, Some(2));
    assert!(stderr.contains('^'), "{stderr}");
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let (code, _, stderr) = qspace(&["verify", "bogus"]);
    assert_eq!(code, Some(2));
    assert!(stderr.contains("bogus"), "{stderr}");
}

#[test]
fn single_suite_json_is_a_passing_report_list() {
    let (code, stdout, _) = qspace(&["--json", "verify", "ybe"]);
    assert_eq!(code, Some(0));
    let reports: Vec<serde_json::Value> = serde_json::from_str(&stdout).expect("json");
    assert_eq!(reports.len(), 2);
    assert!(reports.iter().all(|r| r["status"] == "pass"), "{stdout}");
}
