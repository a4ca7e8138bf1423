use thiserror::Error;

/// Everything that can go wrong while evaluating the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A single input violates its documented domain.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// Home productivity at or above office productivity makes the problem trivial.
    #[error(
        "prod = {prod} >= 1: working from home is at least as productive as the office, \
         so the trivial optimum is occup = 0 (no workplace presence)"
    )]
    TrivialOptimum { prod: f64 },

    /// Inputs are individually valid but the model is undefined for them.
    #[error("model domain error: {0}")]
    ModelDomain(String),

    /// An operation was called with arguments outside its contract.
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    /// Field name for parameter errors, used for field-level diagnostics.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            Error::InvalidParameter { field, .. } => Some(field),
            Error::TrivialOptimum { .. } => Some("prod"),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
