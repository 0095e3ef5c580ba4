use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("direction is parallel or antiparallel to the incident direction")]
    DegenerateDirection,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("potential strength vanishes at one of the points")]
    ZeroStrength,
    #[error("spectral weight has non-finite mass")]
    NonIntegrable,
    #[error("spectral density vanishes in one of the directions")]
    ZeroDenominator,
    #[error("far-zone points lie on spheres of different radius ({0} vs {1})")]
    MismatchedRadius(f64, f64),
    #[error("quadrature did not converge: relative change {rel_change:e} under node doubling")]
    NotConverged { rel_change: f64 },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
