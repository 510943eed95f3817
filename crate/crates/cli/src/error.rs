use bautlab_core::Error;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("{0}")]
    Algebra(#[from] Error),

    #[error("validation failed: {0}")]
    Invalid(String),

    #[error("window too small: {0}")]
    Window(String),
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Schema = 1,
    Validation = 2,
    Window = 3,
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Io { .. } | CliError::Parse(_) | CliError::Schema(_) => ExitStatus::Schema,
            CliError::Window(_) | CliError::Algebra(Error::WindowTooSmall(_)) => ExitStatus::Window,
            CliError::Algebra(Error::DegreeZeroGenerator(..) | Error::UnknownGenerator(_) | Error::BadBracket(_)) => {
                ExitStatus::Schema
            }
            CliError::Algebra(_) | CliError::Invalid(_) => ExitStatus::Validation,
        }
    }
}
