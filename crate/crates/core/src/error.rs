use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial is reducible over Q; factor found: {factor}")]
    Reducible { factor: String },

    #[error("minimal polynomial has no real root greater than 1")]
    NoRealRootAboveOne,

    #[error("precision ceiling of {0} bits exhausted")]
    PrecisionExhausted(u64),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("elements belong to different fields")]
    FieldMismatch,

    #[error("N = {n} is below the validity threshold {threshold}")]
    BelowThreshold { n: u64, threshold: u64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
