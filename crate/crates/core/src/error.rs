use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("no resonance of ring {ring} in band [{lo:e}, {hi:e}] rad/s")]
    EmptyBand { ring: u8, lo: f64, hi: f64 },
    #[error("root finder did not converge for mode order {order}")]
    NoConvergence { order: i64 },
    #[error("coupling constant is zero")]
    DegenerateCoupling,
    #[error("quadrature did not reach tolerance {tol:e} (error estimate {estimate:e}, {subintervals} subintervals)")]
    QuadratureFailure {
        tol: f64,
        estimate: f64,
        subintervals: usize,
    },
    #[error("model assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("missing resonance: {0}")]
    MissingResonance(String),
    #[error("non-physical result: {0}")]
    NonPhysical(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("infeasible design: {0}")]
    Infeasible(String),
    #[error("Kerr validity exceeded: metric {metric:e} > {limit:e}")]
    ValidityExceeded { metric: f64, limit: f64 },
    #[error("malformed device document: {0}")]
    Schema(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Infeasible,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_)
            | Error::EmptyBand { .. }
            | Error::DegenerateCoupling
            | Error::AssumptionViolated(_)
            | Error::MissingResonance(_)
            | Error::Schema(_) => ErrorKind::Validation,
            Error::Infeasible(_)
            | Error::OutOfRange(_)
            | Error::ValidityExceeded { .. }
            | Error::NonPhysical(_) => ErrorKind::Infeasible,
            Error::NoConvergence { .. } | Error::QuadratureFailure { .. } => ErrorKind::Numerical,
        }
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter(msg()))
    }
}
