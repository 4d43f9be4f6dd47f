use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Bad input: wrong dimension, invalid parameter, refused configuration.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not unimodular (determinant {det})")]
    NotUnimodular { det: i128 },

    /// An enumeration or grid would exceed its memory/time budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("census has a zero count at level k = {k}")]
    ZeroCount { k: usize },

    #[error("census is not non-decreasing: N({k}) < N({prev})", prev = k - 1)]
    NotMonotone { k: usize },

    #[error("integer overflow while {0}")]
    Overflow(&'static str),
}

impl Error {
    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    /// True for errors caused by exhausting a budget rather than by bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_))
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
