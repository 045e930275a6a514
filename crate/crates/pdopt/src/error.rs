use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PdoptError {
    #[error(transparent)]
    Core(#[from] pdopt_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("config: {0}")]
    Json(#[from] serde_json::Error),

    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("unknown problem family `{0}`")]
    UnknownFamily(String),
}

impl PdoptError {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        PdoptError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PdoptError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, PdoptError>;
