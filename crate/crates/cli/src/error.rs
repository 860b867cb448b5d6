use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("solver failed: {0}")]
    Solver(#[from] finsler_robin::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }
}
