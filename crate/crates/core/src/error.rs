use thiserror::Error;

/// Errors raised by the simulation and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge after {iterations} iterations (max residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("propagator tolerance {tol:.3e} unreachable within {max_substeps} substeps")]
    ToleranceUnreachable { tol: f64, max_substeps: usize },

    #[error("negative eigenvalue {0:.3e} in density matrix")]
    NotPositive(f64),

    #[error("displacement truncated: unitarity residual {residual:.3e} exceeds {tol:.1e}; increase padding")]
    InsufficientPadding { residual: f64, tol: f64 },

    #[error("conditioning probability {0:.3e} too small")]
    ConditioningUndefined(f64),

    #[error("master-equation integration failed: minimum eigenvalue {0:.3e}")]
    PositivityViolation(f64),

    #[error("free-energy profile is not superradiant: {0}")]
    NotSuperradiant(String),

    #[error("no coexistence window found: {0}")]
    NoCoexistence(String),

    #[error("Gaussian fluctuations unstable at u = {u}, phi = {phi}")]
    UnstableFluctuations { u: f64, phi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
