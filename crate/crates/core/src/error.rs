use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },
    #[error("outside the domain of {what}: {reason}")]
    OutOfDomain { what: &'static str, reason: String },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("insufficient resolution: {0}")]
    Resolution(String),
    #[error("numerical failure in {what}: {reason}")]
    Numeric { what: &'static str, reason: String },
    #[error("memory budget exceeded: {points} samples requested, budget is {budget}")]
    Budget { points: u128, budget: u128 },
    #[error("i/o: {0}")]
    Io(String),
    #[error("malformed field file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
