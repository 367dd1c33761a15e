use std::path::PathBuf;

use thiserror::Error;

use crate::expr::ExprError;

/// Errors surfaced by the command-line front end.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hclust_core::Error),

    #[error("spec-error: {0}")]
    Spec(String),

    #[error("spec-error: {0}")]
    Expr(#[from] ExprError),

    #[error("{0}")]
    NotAdapted(String),

    #[error("golden-mismatch: {0}")]
    Golden(String),

    #[error("io-error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for validation failures, 1 for environment failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            _ => 2,
        }
    }
}
