use thiserror::Error;

/// Errors raised by the simulation, exact-law and oracle routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("vertex set is empty")]
    EmptySet,

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("parity violation: {0}")]
    Parity(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("walk exceeded {0} steps without reaching a free hole")]
    WalkBound(u64),

    #[error("fewer than two certified separators in the window")]
    NoSeparators,

    #[error("strategy {0} has no exact rational law")]
    UnsupportedStrategy(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
