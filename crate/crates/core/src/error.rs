use std::fmt;

use thiserror::Error;

/// Failures surfaced by the verification and testing routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure did not reach its target accuracy.
    #[error("numeric error: {message} (best estimate {estimate}, error estimate {error_estimate})")]
    Numeric {
        message: String,
        estimate: f64,
        error_estimate: f64,
    },

    /// Malformed external input (CSV rows, model strings, ranges).
    #[error("{source_name}:{line}: {message}")]
    Ingestion {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("invalid model specification {spec:?}: {message}")]
    Model { spec: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl fmt::Display) -> Self {
        Error::Domain(msg.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
