//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by loaders, validators and the pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    /// A file could not be parsed; carries the 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Structurally valid input that violates an invariant.
    #[error("validation error: {0}")]
    Validation(String),

    /// A caller-supplied argument is out of range.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Inconsistent model or pipeline configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// An operation was invoked in the wrong state.
    #[error("state error: {0}")]
    State(String),

    /// Tensor shapes do not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// Evaluation cannot proceed (e.g. no ground truth at all).
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// Training cannot proceed (e.g. no annotated frames).
    #[error("training error: {0}")]
    Training(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
