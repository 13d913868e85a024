use std::fmt;

use stlscond_core::Error;

/// Process exit codes. These values are part of the interface.
pub const SUCCESS: i32 = 0;
pub const FAILURE: i32 = 1;
pub const USAGE: i32 = 2;
pub const IO: i32 = 3;
pub const NONGENERIC: i32 = 4;
pub const DEGENERATE: i32 = 5;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Usage(String),
    Io(String),
    Compute(Error),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => USAGE,
            CliError::Io(_) => IO,
            CliError::Compute(e) => compute_code(e),
        }
    }
}

pub fn compute_code(e: &Error) -> i32 {
    match e {
        Error::NongenericProblem { .. } => NONGENERIC,
        Error::ZeroResidual { .. } | Error::ZeroSolution => DEGENERATE,
        Error::InvalidConfig(_) | Error::SampleTooLarge { .. } => USAGE,
        _ => FAILURE,
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "usage error: {s}"),
            CliError::Io(s) => write!(f, "i/o error: {s}"),
            CliError::Compute(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
