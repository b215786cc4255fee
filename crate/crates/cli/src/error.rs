use std::path::PathBuf;

use thiserror::Error;

/// Exit code for success, or a die-out verdict from `threshold`.
pub const EXIT_OK: u8 = 0;
/// Exit code for an infeasible allocation or a no-die-out verdict.
pub const EXIT_NEGATIVE: u8 = 1;
/// Exit code for bad input: unreadable files, malformed config, invalid parameters.
pub const EXIT_INPUT: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] sais_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use sais_core::Error as E;
        match self {
            CliError::Read { .. } | CliError::Config { .. } | CliError::Input(_) => EXIT_INPUT,
            CliError::Write { .. } => EXIT_NEGATIVE,
            CliError::Core(e) => match e {
                E::SelfLoop { .. }
                | E::Parse { .. }
                | E::InvalidParameter(_)
                | E::DimensionMismatch { .. }
                | E::DegenerateRange { .. }
                | E::OutOfDomain { .. }
                | E::OracleTooLarge { .. }
                | E::Io(_)
                | E::Json(_) => EXIT_INPUT,
                _ => EXIT_NEGATIVE,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
