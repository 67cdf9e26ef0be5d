use thiserror::Error;

/// Errors raised by the model, analysis and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("unknown region id {0} (expected 1, 2 or 3)")]
    UnknownRegion(u8),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{quantity} is undefined: {reason}")]
    Undefined {
        quantity: &'static str,
        reason: String,
    },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
