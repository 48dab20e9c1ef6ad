use thiserror::Error;

/// Errors raised by the numerical routines and the file front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("decomposition failed: {0}")]
    DecompositionFailure(String),

    #[error("not a frame: vectors do not span the space (lower bound {lower:e})")]
    NotAFrame { lower: f64 },

    #[error("recovery failed: {0}")]
    RecoveryFailure(String),

    #[error("index error: {0}")]
    Index(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    /// Unreadable or mutually inconsistent inputs (bad files, mismatched
    /// dimensions, bad index lists) as opposed to properties of the numbers.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Io(_) | Error::Shape(_) | Error::Index(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
