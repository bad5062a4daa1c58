use thiserror::Error;

use crate::ranktree::TreeViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid cost model: {0}")]
    InvalidCost(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("invalid tree: {0}")]
    InvalidTree(#[from] TreeViolation),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Exhaustive enumeration refused because the instance is larger than the cap.
    #[error("{what}: size {size} exceeds the enumeration cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
