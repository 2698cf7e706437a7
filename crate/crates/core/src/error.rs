use thiserror::Error;

/// Unified error type for the core library.
///
/// Variants are grouped by how callers should react: `Io` and `Parse` are
/// environment/input problems, `InvalidArgument`/`ShapeMismatch` are caller
/// bugs or bad configuration, and `Numerical` signals a computation that
/// produced non-finite values or otherwise cannot continue.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CoreError {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        CoreError::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        CoreError::InvalidArgument(message.into())
    }

    pub fn shape(message: impl Into<String>) -> Self {
        CoreError::ShapeMismatch(message.into())
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CoreError::Numerical(message.into())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
