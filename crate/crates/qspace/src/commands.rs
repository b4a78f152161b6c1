//! Command-line definitions and subcommand dispatch.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use qspace_core::evolution::{
    build_u, compose_check, dyson_check, heisenberg_check, heisenberg_evolve, schrodinger_check, unitarity_check,
    Direction, Hamiltonian, OperatorSeries, Picture,
};
use qspace_core::hopf::{antipode, translate, HopfVariant};
use qspace_core::ncalgebra::ActMode;
use qspace_core::pairexp::{qexp, ExpKind, TensorSeries};
use qspace_core::qfunc::{act_inverse_partial, act_partial_closed, CFunction};
use qspace_core::report::VerificationReport;
use qspace_core::starcalc::{star, StarContext, StarOrdering};
use qspace_core::Space;

use crate::error::CliError;
use crate::eval::{evaluate, format_numeric, format_numeric_terms, parse_element, parse_function, var_index};
use crate::expr::parse;
use crate::suite::{run_suite, SuiteOptions, SUITES};

/// Exact computer algebra on the extended braided line and the extended
/// three-dimensional q-deformed Euclidean space.
#[derive(Debug, Parser)]
#[command(name = "qspace", version, about)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Quantum space: line or euclid3 (expression commands default to euclid3;
    /// verify restricts its reports to this space when given).
    #[arg(long, global = true)]
    pub space: Option<String>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Print coefficients numerically at this value of q.
    #[arg(long = "q-value", global = true)]
    pub q_value: Option<f64>,
    /// Truncation order of time-evolution series.
    #[arg(long, global = true, default_value_t = 4)]
    pub order: usize,
    /// Tolerance of numeric comparisons.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Total-degree bound for verification suites and exponentials.
    #[arg(long, global = true, default_value_t = 4)]
    pub degree: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run verification suites.
    Verify {
        /// Suite names (evolution, grassmann, hopf-taylor, metric, numeric-integrals,
        /// oracle-actions, pairings, projectors, relations, star, ybe).
        suites: Vec<String>,
        /// Run every suite.
        #[arg(long)]
        all: bool,
    },
    /// Normal form of an expression.
    Nf { expr: String },
    /// Star product of two functions.
    Star {
        f: String,
        g: String,
        /// Ordering: standard or reversed.
        #[arg(long, default_value = "standard")]
        variant: String,
    },
    /// Partial-derivative action on a function.
    D {
        expr: String,
        /// Coordinate to differentiate by (x0, x1, xp, x3, xm).
        #[arg(long)]
        var: String,
        /// Action: left, left-hat, right or right-hat.
        #[arg(long, default_value = "left")]
        variant: String,
    },
    /// Inverse partial derivative (indefinite integral) of a function.
    Int {
        expr: String,
        /// Coordinate to integrate over (x0, x1, xp, x3, xm).
        #[arg(long)]
        var: String,
        /// Action: left, left-hat, right or right-hat.
        #[arg(long, default_value = "left")]
        variant: String,
    },
    /// Translation f(x ⊕ y) of a function.
    Translate {
        expr: String,
        /// L or Lbar.
        #[arg(long, default_value = "Lbar")]
        variant: String,
    },
    /// Antipode f(⊖x) of a function.
    Antipode {
        expr: String,
        /// L or Lbar.
        #[arg(long, default_value = "Lbar")]
        variant: String,
    },
    /// q-exponential truncated at --degree.
    Exp {
        /// x|d, x|dh, d|x or dh|x.
        #[arg(long, default_value = "x|d")]
        variant: String,
    },
    /// Time-evolution operator and its checks.
    Evolve {
        /// Hamiltonian: "free" or an operator expression.
        #[arg(long = "H", default_value = "free")]
        h: String,
        /// Observable whose Heisenberg evolution is printed.
        #[arg(long)]
        observable: Option<String>,
    },
}

#[derive(Serialize)]
struct ExprOutput<'a> {
    command: &'a str,
    space: &'a str,
    input: Vec<String>,
    result: String,
}

fn space_of(g: &GlobalOpts) -> Result<Space, CliError> {
    match &g.space {
        None => Ok(Space::Euclid3),
        Some(s) => Space::parse(s).ok_or_else(|| CliError::eval(format!("unknown space '{s}' (line or euclid3)"))),
    }
}

fn mode_of(s: &str) -> Result<ActMode, CliError> {
    ActMode::parse(s).ok_or_else(|| CliError::eval(format!("unknown action '{s}' (left, left-hat, right, right-hat)")))
}

fn hopf_of(s: &str) -> Result<HopfVariant, CliError> {
    HopfVariant::parse(s).ok_or_else(|| CliError::eval(format!("unknown variant '{s}' (L or Lbar)")))
}

fn show_function(f: &CFunction, g: &GlobalOpts) -> Result<String, CliError> {
    match g.q_value {
        Some(q0) => format_numeric_terms(&f.display_terms(), q0),
        None => Ok(f.to_string()),
    }
}

fn show_series(s: &OperatorSeries, g: &GlobalOpts) -> Result<String, CliError> {
    let Some(q0) = g.q_value else { return Ok(s.to_string()) };
    let mut parts = Vec::new();
    for (n, c) in s.coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let body = format_numeric_terms(&c.display_terms(), q0)?;
        parts.push(match n {
            0 => format!("({body})"),
            1 => format!("t ({body})"),
            _ => format!("t^{n} ({body})"),
        });
    }
    Ok(if parts.is_empty() { "0".into() } else { format!("{} + O(t^{})", parts.join(" + "), s.order + 1) })
}

fn show_exp(e: &TensorSeries, g: &GlobalOpts) -> Result<String, CliError> {
    let Some(q0) = g.q_value else { return Ok(e.to_string()) };
    let terms: Vec<(String, qspace_core::QScalar)> = e
        .terms
        .iter()
        .map(|t| {
            let mut unit = t.clone();
            unit.coeff = qspace_core::QScalar::one();
            let single = TensorSeries { terms: vec![unit], ..e.clone() };
            (single.to_string(), t.coeff.clone())
        })
        .collect();
    format_numeric_terms(&terms, q0)
}

fn emit(out: &mut dyn Write, g: &GlobalOpts, command: &str, space: Space, input: &[&str], result: String) -> std::io::Result<()> {
    if g.json {
        let o = ExprOutput { command, space: space.name(), input: input.iter().map(|s| s.to_string()).collect(), result };
        writeln!(out, "{}", serde_json::to_string_pretty(&o).expect("serializable"))
    } else {
        writeln!(out, "{result}")
    }
}

fn write_reports(out: &mut dyn Write, reports: &[VerificationReport], json: bool) -> std::io::Result<()> {
    if json {
        return writeln!(out, "{}", serde_json::to_string_pretty(reports).expect("serializable"));
    }
    for r in reports {
        let tag = if r.passed() { "PASS" } else { "FAIL" };
        writeln!(out, "{tag} {} [{}]", r.check, r.space)?;
        for n in &r.notes {
            writeln!(out, "  note: {n}")?;
        }
        for f in &r.failures {
            writeln!(out, "  at {}: {} != {}", f.indices, f.lhs, f.rhs)?;
        }
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    writeln!(out, "{} reports, {} failed", reports.len(), failed)
}

/// Executes a parsed command line, writing to `out`; returns the exit code
/// (0 success, 1 verification failure).
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let g = &cli.global;
    let io = |e: std::io::Error| CliError::eval(format!("cannot write output: {e}"));
    match &cli.command {
        Command::Verify { suites, all } => {
            let names: Vec<String> = if *all { SUITES.iter().map(|s| s.to_string()).collect() } else { suites.clone() };
            let opts = SuiteOptions { order: g.order, tol: g.tol, degree: g.degree };
            let mut reports = run_suite(&names, &opts)?;
            if g.space.is_some() {
                let sp = space_of(g)?;
                reports.retain(|r| r.space.split(',').any(|s| s == sp.name()));
            }
            write_reports(out, &reports, g.json).map_err(io)?;
            Ok(if reports.iter().all(|r| r.passed()) { 0 } else { 1 })
        }
        Command::Nf { expr } => {
            let space = space_of(g)?;
            let v = evaluate(&parse(expr)?, space)?;
            let s = match g.q_value {
                Some(q0) => format_numeric(&v, q0)?,
                None => v.to_string(),
            };
            emit(out, g, "nf", space, &[expr], s).map_err(io)?;
            Ok(0)
        }
        Command::Star { f, g: h, variant } => {
            let space = space_of(g)?;
            let ord = match variant.as_str() {
                "standard" | "std" | "W" => StarOrdering::Standard,
                "reversed" | "rev" => StarOrdering::Reversed,
                other => return Err(CliError::eval(format!("unknown ordering '{other}' (standard or reversed)"))),
            };
            let (a, b) = (parse_function(f, space)?, parse_function(h, space)?);
            let r = star(StarContext::new(space, ord), &a, &b);
            emit(out, g, "star", space, &[f, h], show_function(&r, g)?).map_err(io)?;
            Ok(0)
        }
        Command::D { expr, var, variant } | Command::Int { expr, var, variant } => {
            let space = space_of(g)?;
            let (f, i, mode) = (parse_function(expr, space)?, var_index(var, space)?, mode_of(variant)?);
            let (name, r) = match &cli.command {
                Command::D { .. } => ("d", act_partial_closed(space, mode, i, &f)?),
                _ => ("int", act_inverse_partial(space, mode, i, &f)?),
            };
            emit(out, g, name, space, &[expr], show_function(&r, g)?).map_err(io)?;
            Ok(0)
        }
        Command::Translate { expr, variant } | Command::Antipode { expr, variant } => {
            let space = space_of(g)?;
            let (f, v) = (parse_function(expr, space)?, hopf_of(variant)?);
            let (name, r) = match &cli.command {
                Command::Translate { .. } => ("translate", translate(space, v, &f)),
                _ => ("antipode", antipode(space, v, &f)),
            };
            emit(out, g, name, space, &[expr], show_function(&r, g)?).map_err(io)?;
            Ok(0)
        }
        Command::Exp { variant } => {
            let space = space_of(g)?;
            let kind = ExpKind::parse(variant)
                .ok_or_else(|| CliError::eval(format!("unknown exponential '{variant}' (x|d, x|dh, d|x, dh|x)")))?;
            let e = qexp(space, kind, g.degree);
            emit(out, g, "exp", space, &[variant], show_exp(&e, g)?).map_err(io)?;
            Ok(0)
        }
        Command::Evolve { h, observable } => evolve(g, h, observable.as_deref(), out),
    }
}

#[derive(Serialize)]
struct EvolveOutput {
    space: String,
    hamiltonian: String,
    order: usize,
    u: String,
    heisenberg: Option<String>,
    reports: Vec<VerificationReport>,
}

fn evolve(g: &GlobalOpts, h_src: &str, observable: Option<&str>, out: &mut dyn Write) -> Result<i32, CliError> {
    let space = space_of(g)?;
    let h = if h_src == "free" { Hamiltonian::free(space) } else { Hamiltonian::new(parse_element(h_src, space)?, false)? };
    let order = g.order;
    let u = build_u(&h, order, Direction::Forward);
    let mut reports = vec![
        schrodinger_check(&h, order.min(3)),
        compose_check(&h, order as u32),
        dyson_check(&h, order as u32),
    ];
    if h.hermitian {
        reports.push(unitarity_check(&h, order));
    }
    let mut heis = None;
    if let Some(src) = observable {
        let o = parse_element(src, space)?;
        let s = heisenberg_evolve(&o, &h, order, Picture::Unprimed)?;
        heis = Some(show_series(&s, g)?);
        reports.push(heisenberg_check(&o, &h, order.min(3)));
    }
    let ok = reports.iter().all(|r| r.passed());
    let io = |e: std::io::Error| CliError::eval(format!("cannot write output: {e}"));
    if g.json {
        let o = EvolveOutput {
            space: space.name().into(),
            hamiltonian: h.op.to_string(),
            order,
            u: show_series(&u, g)?,
            heisenberg: heis,
            reports,
        };
        writeln!(out, "{}", serde_json::to_string_pretty(&o).expect("serializable")).map_err(io)?;
    } else {
        writeln!(out, "H = {}", h.op).map_err(io)?;
        writeln!(out, "U(t) = {}", show_series(&u, g)?).map_err(io)?;
        if let Some(s) = &heis {
            writeln!(out, "O_H(t) = {s}").map_err(io)?;
        }
        write_reports(out, &reports, false).map_err(io)?;
    }
    Ok(if ok { 0 } else { 1 })
}

/// Evaluates an expression and prints it (used by tests of the printer).
pub fn normal_form_string(src: &str, space: Space) -> Result<String, CliError> {
    Ok(evaluate(&parse(src)?, space)?.to_string())
}
