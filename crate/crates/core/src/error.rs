use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point ({x}, {y}) is outside the open positive quadrant")]
    Domain { x: f64, y: f64 },
    #[error("the equilibrium equations have no solution")]
    NoPositiveEquilibrium,
    #[error("the equilibrium is not isolated (curve of equilibria)")]
    NonIsolatedEquilibrium,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("Taylor degree {have} is too low, need at least {need}")]
    InsufficientDegree { have: usize, need: usize },
    #[error("integration failed: {0}")]
    IntegrationFailure(String),
    #[error("orbit did not return to the section: {0}")]
    NoReturn(String),
    #[error("parameters do not satisfy case {0}")]
    CaseMismatch(String),
    #[error("no closed-form first integral is known for case {0}")]
    NoKnownIntegral(String),
    #[error("K is undefined: b3 - b1 - 1 = 0")]
    DegenerateK,
    #[error("base point must have L2 < 0, got L2 = {0}")]
    BadBase(f64),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("parse error: {0}")]
    Parse(String),
}
