use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("not found: {0}")]
    NotFound(String),

    #[error("method `{0}` has no mutants")]
    EmptyStratum(String),

    #[error("format error at line {line}: {message}")]
    Format { line: u64, message: String },

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: usize, actual: usize },

    #[error("nothing to evaluate: {0}")]
    NothingToEvaluate(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error(transparent)]
    Lang(#[from] crate::toy::LangError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn format(line: u64, message: impl Into<String>) -> Self {
        Error::Format {
            line,
            message: message.into(),
        }
    }

    /// Domain errors are caused by the inputs' content rather than their
    /// syntax; the CLI maps them to a distinct exit code.
    pub fn is_domain(&self) -> bool {
        match self {
            Error::InvalidObservation(_)
            | Error::EmptyDataset
            | Error::NothingToEvaluate(_)
            | Error::EmptyStratum(_)
            | Error::NotFound(_)
            | Error::Shape { .. } => true,
            Error::Lang(e) => e.is_domain(),
            _ => false,
        }
    }
}
