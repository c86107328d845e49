use thiserror::Error;

/// Errors raised by the algebra, inference and analysis layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A domain or assignment refers to variables outside the expected set.
    #[error("domain error: {0}")]
    Domain(String),
    /// A caller-supplied argument is malformed.
    #[error("argument error: {0}")]
    Argument(String),
    /// The operation is not available for this valuation algebra.
    #[error("capability error: {0}")]
    Capability(String),
    /// A configured size limit would be exceeded.
    #[error("resource error: {0}")]
    Resource(String),
    /// An input violates a structural invariant (frames, models, scenarios).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// A documented precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
