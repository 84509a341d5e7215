//! File formats and command implementations behind the `circle-rearrange`
//! binary. Every command returns its output as a string so the binary only
//! prints and picks an exit code.

pub mod commands;
pub mod format;

use circle_rearrange_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    /// A violated precondition; the message names the predicate.
    #[error("{0}")]
    Hypothesis(String),
    /// A monotone trace went the wrong way between two rows.
    #[error("{0}")]
    Nonmonotone(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) | CliError::Usage(_) => 2,
            CliError::Hypothesis(_) => 3,
            CliError::Nonmonotone(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(m) => CliError::Parse(m),
            other => CliError::Hypothesis(other.to_string()),
        }
    }
}
