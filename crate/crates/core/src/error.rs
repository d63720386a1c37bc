use thiserror::Error;

/// Errors raised by the library.
///
/// `Hypothesis` is kept apart from `InvalidArgument` so that drivers can tell a
/// malformed request from a request that violates the assumptions of the
/// theorem being checked.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid quadratic irrational: {0}")]
    InvalidQuadratic(String),

    #[error("incompatible radicands: sqrt({0}) and sqrt({1}) live in different fields")]
    IncompatibleRadicands(u64, u64),

    #[error("phi must be irrational")]
    RationalInput,

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("perturbation entry {pattern:?} has |delta| = {delta} which is not below lambda = {lambda}")]
    PerturbationTooLarge {
        pattern: String,
        delta: f64,
        lambda: f64,
    },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
