use thiserror::Error;

/// Errors raised by the probe, measurement and sweep machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("operator is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("measurement angle undefined: conditional probe states coincide")]
    DegenerateAngle,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("conditioning probability vanishes for outcome {outcome} given signal {signal}")]
    DegenerateConditioning { outcome: usize, signal: char },

    #[error("no feasible grid point: {0}")]
    NoFeasiblePoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
