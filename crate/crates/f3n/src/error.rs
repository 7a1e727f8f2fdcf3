use std::fmt;

use f3n_core::Error;

/// Failure classes of a run, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Identity(String),
    Guard(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 1,
            CliError::Identity(_) => 2,
            CliError::Guard(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Identity(m) => write!(f, "identity violation: {m}"),
            CliError::Guard(m) => write!(f, "resource guard: {m} (pass --force to override)"),
            CliError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::IdentityViolation(_) => CliError::Identity(e.to_string()),
            _ if e.is_guard() => CliError::Guard(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
