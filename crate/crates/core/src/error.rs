use thiserror::Error;

/// Errors surfaced by every fallible operation in this crate.
///
/// The variants double as process exit codes for the CLI: a verification
/// failure is 1, malformed or oversized input is 2, and a violated
/// hypothesis (the caller asked us to verify a statement whose
/// preconditions do not hold) is 3.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("hypothesis violation: {0}")]
    HypothesisViolation(String),
    #[error("verification failure: {0}")]
    VerificationFailure(String),
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::VerificationFailure(_) => 1,
            Error::InvalidInput(_) => 2,
            Error::CapacityExceeded(_) => 2,
            Error::HypothesisViolation(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
