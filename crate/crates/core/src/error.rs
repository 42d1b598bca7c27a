use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("integer overflow computing {0}")]
    Overflow(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate family member at j = {j}: {reason}")]
    DegenerateFamily { j: u32, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("oracle limits exceeded: {0}")]
    LimitsExceeded(String),

    #[error("compact set is not real: {0}")]
    NotReal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
