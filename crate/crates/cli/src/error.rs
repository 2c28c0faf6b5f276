use std::process::ExitCode;

use gbdt::GbdtError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numeric(GbdtError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("tolerance breach: {0}")]
    Breach(String),
}

impl From<GbdtError> for CliError {
    /// Malformed input is a configuration problem; everything else arose
    /// while computing.
    fn from(e: GbdtError) -> Self {
        match e {
            GbdtError::ShapeMismatch(_)
            | GbdtError::NonFinite { .. }
            | GbdtError::InvalidGrid(_)
            | GbdtError::InvalidParameter(_) => CliError::Config(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Breach(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 3,
        })
    }
}
