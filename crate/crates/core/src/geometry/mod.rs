//! Polynomial conformal maps of the unit disk, their admissibility checks and
//! boundary sampling.

pub mod boundary;
pub mod map;
pub mod univalence;

pub use boundary::{sample_boundary, BoundaryCurve};
pub use map::{ConformalMap, FloatMap};
pub use univalence::{check_univalence, singular_set_clearance, UnivalenceReport};
