use thiserror::Error;

/// Errors raised by density, entropy, body and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("direction is not a unit vector (norm {0})")]
    NotUnit(f64),

    #[error("zero vector")]
    ZeroVector,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("excluded tail mass {tail:.3e} beyond truncation radius {radius} exceeds 1e-10")]
    TailMass { radius: f64, tail: f64 },

    #[error("resolution {0} is below the minimum of 16")]
    Resolution(usize),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("entropy power is infinite")]
    InfiniteEntropyPower,

    #[error("asymmetric input: {0}")]
    Asymmetric(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("malformed density spec at `{field}`: {reason}")]
    Spec { field: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
