//! Elliptic operators of the coefficient profiles, their intertwiners and
//! polynomial solution bases.

pub mod basis;
pub mod diffop;
pub mod elliptic;
pub mod intertwiner;
pub mod profile;

pub use basis::{build_solution_basis, BasisGenerator, SolutionBasis};
pub use diffop::{DiffOperator, OpTerm};
pub use elliptic::{build_elliptic_operator, clearing_factor, mirror_a, mirror_b};
pub use intertwiner::{
    build_dihedral_intertwiner, build_power_x_intertwiner, dihedral_seeds, first_failing_monomial,
    intertwining_defect, power_x_euler_coefficients, power_x_intertwiner, DihedralIntertwiner,
};
pub use profile::CoefficientProfile;
