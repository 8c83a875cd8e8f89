use thiserror::Error;

/// Broad classes of failure, used by callers that map errors onto exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Unsupported,
    Inconsistency,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("slope of the zero dimension vector is undefined")]
    UndefinedSlope,

    #[error("unsupported input: {0}")]
    Unsupported(String),

    #[error("refusing to enumerate {needed} candidates (budget {budget})")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("poincaré polynomial unknown for components: {}", .0.join(", "))]
    PartialResult(Vec<String>),

    #[error("malformed document: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Validation(_) | Error::UndefinedSlope | Error::Json(_) => ErrorKind::Validation,
            Error::Unsupported(_) | Error::BudgetExceeded { .. } | Error::PartialResult(_) => ErrorKind::Unsupported,
            Error::Inconsistency(_) => ErrorKind::Inconsistency,
        }
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }

    pub(crate) fn inconsistency(msg: impl Into<String>) -> Self {
        Error::Inconsistency(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
