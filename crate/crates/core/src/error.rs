use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty corpus: nothing to train on")]
    EmptyCorpus,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("need at least {k} points to build {k} clusters, got {n}")]
    TooFewPoints { n: usize, k: usize },
    #[error("unknown grade {grade:?} for user {user}")]
    UnknownGrade { user: String, grade: String },
    #[error("invalid unit {0:?}")]
    InvalidUnit(String),
}

pub type Result<T> = core::result::Result<T, Error>;
