use thiserror::Error;

/// Errors raised by operator construction, evaluation and the iteration drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite entry at position {index}")]
    NonFinite { index: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An active selector or user callback broke its contract (empty or
    /// out-of-range index set).
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("infinite value: {0}")]
    InfiniteValue(String),

    #[error("oracle failure: {0}")]
    Oracle(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
