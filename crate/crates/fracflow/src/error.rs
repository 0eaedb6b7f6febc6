use thiserror::Error;

/// Failures reported by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("gamma function pole at nonpositive integer {0}")]
    PoleAtNonpositiveInteger(f64),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("Mellin kernel evaluated on a pole near s = {0}")]
    PoleHit(f64),
    #[error("argument z = {z} outside the convergence region (radius {radius})")]
    OutOfConvergenceRegion { z: f64, radius: f64 },
    #[error("asymptotic expansion unreliable: first omitted term {omitted:e} vs value {value:e}")]
    AsymptoticUnreliable { value: f64, omitted: f64 },
    #[error("kernel is singular at the origin for these parameters")]
    SingularAtOrigin,
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("quadrature under-resolved: {0}")]
    QuadratureUnderResolved(String),
    #[error("kernel bound violated at sampled pair: {0}")]
    KernelBoundViolation(String),
    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),
    #[error("root find failed: {0}")]
    RootFindFailure(String),
    #[error("degenerate fitting window: {0}")]
    DegenerateWindow(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
