//! Command-line front end of the quantum-space kernel: expression parsing
//! and printing, evaluation into the kernel's algebras, verification suites
//! and subcommand dispatch.

pub mod commands;
pub mod error;
pub mod eval;
pub mod expr;
pub mod suite;

pub use commands::{execute, Cli};
pub use error::CliError;
pub use expr::{parse, print, Expr};
pub use suite::{run_suite, SuiteOptions, SUITES};
