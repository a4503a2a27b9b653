//! Exact arithmetic: Gaussian rationals, polynomials in `(z, z̄)`, Laurent
//! polynomials in the map variable and graded trigonometric expressions.

pub mod bivar;
pub mod laurent;
pub mod scalar;
pub mod trig;

pub use bivar::{BivarPoly, Mono, TermRecord};
pub use laurent::{compose_boundary, power_table, residue, Laurent, LaurentPoly};
pub use scalar::{format_rat, parse_rat, rat, rat_int, rat_to_f64, CRat, Rat, Scalar};
pub use trig::{determinant, TrigLaurent};
