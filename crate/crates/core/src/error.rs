use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular input: {0}")]
    Singular(String),

    #[error("quadrature did not converge for {quantity} (estimate {value:e} ± {abs_err:e})")]
    NonConvergence {
        quantity: String,
        value: f64,
        abs_err: f64,
    },

    #[error("undefined angle: both transforms vanish")]
    UndefinedAngle,

    #[error("series truncated: {0}")]
    Truncated(String),

    #[error("indeterminate limit: {0}")]
    Indeterminate(String),

    #[error("non-finite evaluation of {what} at {at}")]
    NonFinite { what: &'static str, at: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
