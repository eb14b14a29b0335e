use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, GpError>;

#[derive(Debug, Error)]
pub enum GpError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("a case set needs at least one fitness case")]
    EmptyCaseSet,

    #[error("cannot parse strategy `{text}`: {reason}")]
    Strategy { text: String, reason: String },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("config error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Config {
        message: String,
        line: Option<usize>,
    },

    #[error("malformed data: {0}")]
    Data(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GpError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        GpError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GpError::Io {
            path: path.into(),
            source,
        }
    }
}
