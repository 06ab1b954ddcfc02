use thiserror::Error;

/// Errors raised by the engine.
///
/// Validation *failures* are not errors: validators return a
/// [`Verdict`](crate::Verdict) describing the first violation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Malformed(String),

    #[error("rank mismatch: {what} has shape {found}, expected {expected}")]
    RankMismatch { what: String, found: String, expected: String },

    #[error("degree overflow: sequence {seq} has degree {degree} > bound {bound}")]
    DegreeOverflow { seq: String, degree: usize, bound: usize },

    #[error("bound mismatch: {0}")]
    BoundMismatch(String),

    #[error("base ring mismatch: {0}")]
    BaseMismatch(String),

    #[error("not a derivation: {0}")]
    NotDerivation(String),

    #[error("not a cocycle: {0}")]
    NotCocycle(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("exact solution needs denominators; the integral model cannot represent it")]
    NonIntegral,

    #[error("internal inconsistency (this is a bug): {0}")]
    Internal(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub type Result<T> = std::result::Result<T, Error>;
