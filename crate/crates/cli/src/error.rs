use std::fmt;

use stark_core::StarkError;

#[derive(Debug)]
pub enum CliError {
    /// Bad or inconsistent flags; exit 2.
    Usage(String),
    /// No solution, numerical failure or I/O failure; exit 1.
    Failure(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => f.write_str(m),
        }
    }
}

/// Out-of-domain arguments are usage errors; everything else the library
/// reports is a failure to find or compute a solution.
impl From<StarkError> for CliError {
    fn from(e: StarkError) -> Self {
        match e {
            StarkError::Domain(_) | StarkError::ZeroAngularMomentum => CliError::Usage(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

pub fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}
