use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input (dimension mismatch, precondition violated).
    #[error("input error: {0}")]
    Input(String),
    /// Non-finite values or a numerical routine that failed to produce a result.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A request that exceeds a configured size cap.
    #[error("capacity error: {0}")]
    Capacity(String),
    /// No sampled point of the feasible set was found where one is needed.
    #[error("feasible sample not found: {0}")]
    FeasibleSampleNotFound(String),
    /// Problem-file parse or schema failure.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    /// Too few usable samples to draw a conclusion.
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn check_dim(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return input(format!("{what}: expected dimension {expected}, got {got}"));
    }
    Ok(())
}
