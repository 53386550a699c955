use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A time, ratio, size or speed that is zero, negative or not finite.
    #[error("invalid metric at {location}: {value} (must be finite and > 0)")]
    InvalidMetric { location: String, value: f64 },

    #[error("invalid criteria: {0}")]
    InvalidCriteria(String),

    #[error("duplicate method id `{0}`")]
    DuplicateMethod(String),

    #[error("decode error: {0}")]
    Decode(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("unverified results: {0}")]
    Unverified(String),

    #[error("external command `{command}` failed ({status}): {stderr}")]
    ExternalFailure {
        command: String,
        status: String,
        stderr: String,
    },

    #[error("external command `{command}` exceeded its {seconds} s timeout")]
    Timeout { command: String, seconds: f64 },

    #[error("program `{program}` not found")]
    NotFound { program: String },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(location: impl Into<String>, value: f64) -> Self {
        Error::InvalidMetric {
            location: location.into(),
            value,
        }
    }

    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }

    /// True for failures raised by an external compressor process.
    pub fn is_external(&self) -> bool {
        matches!(
            self,
            Error::ExternalFailure { .. } | Error::Timeout { .. } | Error::NotFound { .. }
        )
    }
}

/// Checks that `value` is finite and strictly positive.
pub(crate) fn positive(value: f64, location: impl FnOnce() -> String) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid(location(), value))
    }
}
