use std::path::PathBuf;

use causal_pathways_core::Error as CoreError;

/// Errors of the file formats and the command-line pipeline.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Malformed input file; `line` is 1-based.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{context}: {source}")]
    Core { context: String, source: CoreError },
    #[error("{0}")]
    Validation(String),
}

impl AppError {
    /// Process exit code: 2 usage, 3 data or model, 4 validation failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Usage(_) => 2,
            AppError::Io { .. } | AppError::Parse { .. } | AppError::Core { .. } => 3,
            AppError::Validation(_) => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        AppError::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

/// Attaches context to core errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, AppError>;
}

impl<T> Context<T> for Result<T, CoreError> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, AppError> {
        self.map_err(|source| AppError::Core {
            context: what(),
            source,
        })
    }
}

pub type Result<T, E = AppError> = std::result::Result<T, E>;
