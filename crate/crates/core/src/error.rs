use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate input at index {index}: {reason}")]
    DegenerateInput { index: usize, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unbounded condition: {0}")]
    Unbounded(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A fit ended with every weight at zero.
    #[error("degenerate model: {0}")]
    ZeroModel(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("unsupported format_version {found} (expected {expected})")]
    FormatVersion { expected: u32, found: u32 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn degenerate(index: usize, reason: impl Into<String>) -> Self {
        Error::DegenerateInput {
            index,
            reason: reason.into(),
        }
    }

    /// True for errors caused by the caller's arguments rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_) | Error::Unsupported(_) | Error::Unbounded(_)
        )
    }
}
