use thiserror::Error;

/// Errors raised by frame construction and the inequality machinery.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a frame: {0}")]
    NotAFrame(String),

    #[error("ill-conditioned frame operator (condition number {condition:.3e} exceeds {cap:.3e})")]
    IllConditioned { condition: f64, cap: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown {kind} `{name}`")]
    UnknownName { kind: &'static str, name: String },

    #[error("signal must be nonzero")]
    ZeroSignal,

    #[error("frames must be tight: {0}")]
    NotTight(String),

    #[error("invalid frame file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
