//! Errors of the command-line layer.

use qspace_core::QError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Syntax error at a character offset of the input.
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    /// Well-formed input that cannot be evaluated (wrong space, bad power, …).
    #[error("{0}")]
    Eval(String),
    #[error("unknown suite '{0}' (known: {1})")]
    UnknownSuite(String, String),
    #[error(transparent)]
    Core(#[from] QError),
}

impl CliError {
    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        CliError::Parse { pos, msg: msg.into() }
    }
    pub fn eval(msg: impl Into<String>) -> Self {
        CliError::Eval(msg.into())
    }
    /// Character offset of a syntax error.
    pub fn position(&self) -> Option<usize> {
        match self {
            CliError::Parse { pos, .. } => Some(*pos),
            _ => None,
        }
    }
    /// Renders the error with a caret under the offending position.
    pub fn annotate(&self, src: &str) -> String {
        match self.position() {
            Some(p) => format!("{self}\n  {src}\n  {}^", " ".repeat(p)),
            None => self.to_string(),
        }
    }
}
