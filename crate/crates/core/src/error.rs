use thiserror::Error;

use crate::planar::{EtaClass, XiClass};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StarkError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular configuration: {0}")]
    Singularity(String),

    #[error("no convergence after {iterations} iterations in {what}")]
    Convergence { what: &'static str, iterations: usize },

    #[error("quadratic has no real roots (discriminant {0:.3e})")]
    NoRealRoots(f64),

    #[error("xi motion of class {0:?} has no finite oscillation period")]
    XiClassMismatch(XiClass),

    #[error("eta motion of class {0:?} has no finite oscillation period")]
    EtaClassMismatch(EtaClass),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("cubic root pattern admits no oscillation: {0}")]
    RootPattern(String),

    #[error("angular momentum must be non-zero (use the planar routines for L = 0)")]
    ZeroAngularMomentum,

    #[error("integration aborted at {at:.6}: {reason}")]
    Integration { at: f64, reason: String },

    #[error("inconsistent initial data: residual {0:.3e}")]
    InconsistentInitialData(f64),
}

pub type Result<T> = std::result::Result<T, StarkError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(StarkError::Domain(msg.into()))
}
