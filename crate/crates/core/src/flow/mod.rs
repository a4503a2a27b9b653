//! Conformal-map dynamics: Polubarinova–Galin and string-constraint
//! evolution, and recovery of maps from their moments.

mod evolve;
mod invert;
mod velocity;

pub use evolve::{evolve, evolve_with, EvolveOptions, FlowState, LogEntry, Monitor, SourceSchedule};
pub use invert::{centered_moments, invert_moments, Inversion, MAX_NEWTON_ITERATIONS, NEWTON_TOLERANCE};
pub use velocity::{bracket, pg_velocities, string_velocities, sup_on_circle, Velocities, VelocityField, MAX_CONDITION};
