use std::fmt;

use gaitweight::Error;

/// Error carrying the process exit code: 2 for usage, config and input
/// problems, 3 for runtime and numerical failures.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

impl Failure {
    pub fn usage(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_USAGE, error: error.into() }
    }

    pub fn runtime(error: impl Into<anyhow::Error>) -> Self {
        Self { code: EXIT_RUNTIME, error: error.into() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Diverged { .. } | Error::InvalidState(_) | Error::UndefinedMetric(_) | Error::Io(_) => {
                Self::runtime(e)
            }
            _ => Self::usage(e),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, Failure>;

pub fn bail_usage<T>(msg: impl fmt::Display) -> CliResult<T> {
    Err(Failure::usage(anyhow::anyhow!("{msg}")))
}
