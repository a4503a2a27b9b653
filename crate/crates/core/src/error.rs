use thiserror::Error;

/// Malformed textual input (rationals, polynomials, profiles, map specs).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error: {message}")]
pub struct ParseError {
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError { message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("source point {0} lies on the singular set of the profile")]
    SourceOnSingularSet(String),

    #[error("profile {0} has no polynomial solution basis")]
    Unsupported(String),

    #[error("exact division left a nonzero remainder: {0}")]
    InexactDivision(String),

    #[error("intertwiner validation failed: {0}")]
    IntertwinerValidation(String),

    #[error("kernel check failed for basis element {index}: {detail}")]
    KernelCheck { index: usize, detail: String },

    #[error("moment system is singular (rank {rank} < {unknowns} unknowns) for multipole orders tried {tried:?}")]
    SingularSystem { rank: usize, unknowns: usize, tried: Vec<usize> },

    #[error("held-out equation violated at basis order {order}: residual {residual}")]
    HeldOutViolation { order: usize, residual: String },

    #[error("velocity system singular (condition estimate {condition:e})")]
    SingularVelocitySystem { condition: f64 },

    #[error("univalence lost at t = {t}: {detail}")]
    UnivalenceLost { t: f64, detail: String },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Newton Jacobian is singular")]
    JacobianSingular,

    #[error("non-finite integrand value at node w = {re} + {im}i")]
    NonFinite { re: f64, im: f64 },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
