use thiserror::Error;

/// Errors raised by the statistic, simulation and fitting routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("sample covariance is singular (smallest eigenvalue {min_eigenvalue:e}, largest {max_eigenvalue:e})")]
    SingularCovariance {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("beta = {value} is out of range: {requirement}")]
    BetaOutOfRange {
        value: f64,
        requirement: &'static str,
    },

    #[error("statistic is not representable: exponent {exponent:.1} overflows f64")]
    NonFiniteResult { exponent: f64 },

    #[error("quadrature supports d <= {max}, got d = {d}")]
    DimensionTooLarge { d: usize, max: usize },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("QMLE did not converge after {iterations} iterations (gradient norm {gradient_norm:e})")]
    OptimizerFailed {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("log-likelihood is not finite at the starting point")]
    ExplosiveRegion,

    #[error("conditional variance exceeded {limit:e} at step {step}; the parameters are explosive")]
    NonStationaryExplosion { step: usize, limit: f64 },

    #[error("{failed} of {total} bootstrap replicates failed to fit (limit is 5%)")]
    TooManyBootstrapFailures { failed: usize, total: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
