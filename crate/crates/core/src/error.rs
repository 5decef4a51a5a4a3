use thiserror::Error;

/// Everything that can go wrong between reading a file and emitting a report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("label index {index} out of range for {labels} labels")]
    Encoding { index: usize, labels: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "normal equations are numerically singular (condition estimate {condition:.3e}); \
         use a positive ridge or a larger initial block"
    )]
    Singular { condition: f64 },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("model state error: {0}")]
    State(String),

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: schema error: {message}")]
    Schema { line: usize, message: String },

    #[error("unsupported model format version {found} (this build reads version {expected})")]
    Version { found: u32, expected: u32 },

    #[error("model file integrity error: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Coarse grouping used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Configuration,
    Data,
    Numerical,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) | Error::State(_) => ErrorCategory::Configuration,
            Error::Singular { .. } | Error::Numerical(_) => ErrorCategory::Numerical,
            Error::Encoding { .. }
            | Error::Shape(_)
            | Error::Stats(_)
            | Error::Parse { .. }
            | Error::Schema { .. }
            | Error::Version { .. }
            | Error::Integrity(_)
            | Error::Io(_) => ErrorCategory::Data,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
