use thiserror::Error;

/// Errors raised by the workbench operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A configured iteration or return-time cap was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    /// A stated precondition on the cocycle or system does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Two reports that must describe the same system do not.
    #[error("provenance mismatch: {0}")]
    Provenance(String),
    /// An internal consistency check failed.
    #[error("invariant breach: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
