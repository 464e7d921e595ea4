use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("config is not valid JSON: {0}")]
    Json(serde_json::Error),

    #[error("invalid config field `{field}`: {message}")]
    Field { field: String, message: String },

    #[error("invalid override `{0}`: expected key=value")]
    Override(String),

    #[error("invalid SCALEVAR_THREADS value `{0}`: expected a positive integer")]
    Threads(String),

    #[error("{context}: {source}")]
    Core { context: String, source: scalevar_core::Error },
}

impl CliError {
    pub fn field(field: impl Into<String>, message: impl ToString) -> Self {
        CliError::Field { field: field.into(), message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. } | CliError::Json(_) | CliError::Field { .. } => 2,
            CliError::Override(_) | CliError::Threads(_) => 2,
            CliError::Core { source, .. } if source.is_numerical() => 3,
            CliError::Core { .. } => 2,
            CliError::Write { .. } => 1,
        }
    }
}

/// Attaches a context label to core errors.
pub trait Context<T> {
    fn context(self, what: &str) -> Result<T, CliError>;
}

impl<T> Context<T> for Result<T, scalevar_core::Error> {
    fn context(self, what: &str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { context: what.to_string(), source })
    }
}
