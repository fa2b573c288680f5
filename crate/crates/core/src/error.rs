use thiserror::Error;

/// Errors produced by the analysis library.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid mechanism, post-processor, utility or tuple.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Malformed textual value (rational, hyperreal, epsilon).
    #[error("parse error: {0}")]
    Parse(String),

    /// Scenario or mechanism file failed validation. `path` is a JSON path.
    #[error("{path}: {message}")]
    Validation { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
