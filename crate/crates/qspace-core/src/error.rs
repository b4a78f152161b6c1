//! Error type shared by every kernel module.

use thiserror::Error;

/// Errors raised by kernel operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole of rational function at q = {0}")]
    Pole(String),
    #[error("generators from different spaces mixed: {0}")]
    MixedSpace(String),
    #[error("purity precondition violated: {0}")]
    Impure(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("series did not converge: {0}")]
    NonConvergence(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Result alias for kernel operations.
pub type QResult<T> = Result<T, QError>;
