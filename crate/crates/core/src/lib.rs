//! Quadrature identities and conformal-map dynamics for Hele-Shaw problems
//! with variable coefficients.

pub mod algebra;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod moments;
pub mod operators;
pub mod oracle;
pub mod quad_solver;

pub use algebra::{BivarPoly, CRat, LaurentPoly, Rat, TrigLaurent};
pub use error::{Error, ParseError, Result};
pub use geometry::{ConformalMap, FloatMap};
pub use operators::{CoefficientProfile, DiffOperator, SolutionBasis};
pub use quad_solver::{construct_identity, evaluate_rhs, multipole_order, QuadratureIdentity};
