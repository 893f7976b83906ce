use thiserror::Error;

/// Failure classes reported by the engine.
///
/// `Domain` means an input lies outside an operation's mathematical domain,
/// `Shape` means an arity or dimension mismatch (the message names the
/// offending slot), `Usage` means the operation is not defined for the value
/// it was invoked on, and `Numeric` means an iteration failed to converge.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("numeric error: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
