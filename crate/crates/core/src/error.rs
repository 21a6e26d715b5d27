use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an interface contract (dimension/base mismatch,
    /// wrong oracle mode, bad cycle order, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid or infeasible parameters.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// An operation exceeded a resource limit (exact-mode cap, rejection
    /// budget, ...).
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl Error {
    pub fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
