use std::path::PathBuf;

use collectivity_core::Error as CoreError;
use thiserror::Error;

/// A configuration problem, located by field and (when known) source line.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("config error in `{field}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
pub struct ConfigError {
    pub field: String,
    pub line: Option<usize>,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// Process exit code: 2 config, 3 numeric, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io { .. } => 4,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            CoreError::NonFinite { .. } => CliError::Numeric(err.to_string()),
            CoreError::InvalidParameter { name, reason } => CliError::Config(ConfigError {
                field: name.to_string(),
                line: None,
                message: reason,
            }),
            CoreError::ShapeMismatch { .. } => CliError::Numeric(err.to_string()),
        }
    }
}
