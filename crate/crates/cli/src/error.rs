use std::path::PathBuf;
use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{op} failed: {message}")]
    Computation { op: &'static str, message: String },
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Adapter for `map_err` naming the failing operation.
    pub fn during<E: std::fmt::Display>(op: &'static str) -> impl Fn(E) -> Self {
        move |e| CliError::Computation {
            op,
            message: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Computation { .. } | CliError::Io { .. } => ExitCode::from(3),
        }
    }
}
