use std::fmt;

use fracboussinesq::Error;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed configuration, bad arguments, unusable paths.
    Config(String),
    /// A documented precondition does not hold.
    Precondition(String),
    /// A marching run blew up.
    Diverged(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::Diverged(_) => EXIT_NOT_CONVERGED,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Precondition(m) => write!(f, "{m}"),
            CliError::Diverged(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } | Error::Json(_) | Error::Format(_) => CliError::Config(e.to_string()),
            Error::BlowUp { .. } => CliError::Diverged(e.to_string()),
            _ => CliError::Precondition(e.to_string()),
        }
    }
}
