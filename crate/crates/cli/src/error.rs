use std::fmt;

use selfdual::Error;

/// Anything that stops a command before it produces a verdict.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    /// 2 usage, 4 numerical domain, 5 guard violation.
    pub fn code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Io(_) => 2,
            Self::Core(e) => match e {
                Error::HyperbolicityLost { .. } | Error::CflViolation { .. } => 5,
                Error::InvalidParams(_) | Error::BadGrid(_) => 2,
                _ => 4,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage: {m}"),
            Self::Io(m) => write!(f, "io: {m}"),
            Self::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
