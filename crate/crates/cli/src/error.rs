use std::fmt;

use mgf_normality::Error;

/// Failure classes with their process exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::BetaOutOfRange { .. } | Error::InvalidSpec(_) | Error::DimensionTooLarge { .. } => {
                CliError::Usage(msg)
            }
            Error::Parse { .. } | Error::InvalidSample(_) | Error::SingularCovariance { .. } | Error::Io(_) => {
                CliError::Data(msg)
            }
            Error::NonFiniteResult { .. }
            | Error::OptimizerFailed { .. }
            | Error::ExplosiveRegion
            | Error::NonStationaryExplosion { .. }
            | Error::TooManyBootstrapFailures { .. } => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
