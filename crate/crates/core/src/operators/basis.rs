use serde::Serialize;

use crate::algebra::{BivarPoly, CRat};
use crate::error::{Error, Result};

use super::diffop::DiffOperator;
use super::elliptic::build_elliptic_operator;
use super::intertwiner::{build_dihedral_intertwiner, power_x_intertwiner};
use super::profile::CoefficientProfile;

/// `[1, φ_1, φ̄_1, φ_2, φ̄_2, …]`, every element in the kernel of the profile's
/// cleared operator.
#[derive(Clone, Debug, Serialize)]
pub struct SolutionBasis {
    pub profile: CoefficientProfile,
    pub z1: String,
    pub elements: Vec<BivarPoly>,
}

impl SolutionBasis {
    /// Number of conjugate pairs after `φ_0 = 1`.
    pub fn count(&self) -> usize {
        (self.elements.len() - 1) / 2
    }

    /// `φ_k`, with `φ_0 = 1`.
    pub fn phi(&self, k: usize) -> &BivarPoly {
        if k == 0 {
            &self.elements[0]
        } else {
            &self.elements[2 * k - 1]
        }
    }

    pub fn phi_conj(&self, k: usize) -> &BivarPoly {
        if k == 0 {
            &self.elements[0]
        } else {
            &self.elements[2 * k]
        }
    }
}

/// Generates `φ_k = T[(z − z1)^(k + shift)]` on demand and checks each against
/// the cleared operator.
#[derive(Clone, Debug)]
pub struct BasisGenerator {
    profile: CoefficientProfile,
    z1: CRat,
    intertwiner: DiffOperator,
    shift: i64,
    cleared: DiffOperator,
}

impl BasisGenerator {
    pub fn new(profile: &CoefficientProfile, z1: &CRat) -> Result<Self> {
        let cleared = build_elliptic_operator(profile)?;
        if profile.on_singular_set(z1) {
            return Err(Error::SourceOnSingularSet(z1.to_string()));
        }
        let (intertwiner, shift) = match profile {
            CoefficientProfile::Constant => (DiffOperator::identity(), 0),
            CoefficientProfile::GaugeTrivial { .. } => {
                return Err(Error::Unsupported(format!(
                    "{profile}: kernel elements are h⁻¹·(harmonic), not polynomials"
                )))
            }
            CoefficientProfile::PowerX { n, x1 } => (power_x_intertwiner(*n, x1)?, *n as i64),
            CoefficientProfile::Dihedral { n, l, m } => {
                (build_dihedral_intertwiner(*n, *l, *m)?.operator().clone(), -1)
            }
        };
        Ok(BasisGenerator { profile: profile.clone(), z1: z1.clone(), intertwiner, shift, cleared })
    }

    pub fn profile(&self) -> &CoefficientProfile {
        &self.profile
    }

    pub fn z1(&self) -> &CRat {
        &self.z1
    }

    pub fn intertwiner(&self) -> &DiffOperator {
        &self.intertwiner
    }

    pub fn cleared_operator(&self) -> &DiffOperator {
        &self.cleared
    }

    /// `φ_k` for `k >= 1`; `φ_0 = 1`.
    pub fn element(&self, k: usize) -> Result<BivarPoly> {
        if k == 0 {
            return Ok(BivarPoly::one());
        }
        let power = k as i64 + self.shift;
        let seed = BivarPoly::shifted_z_power(&self.z1, power as u32);
        let phi = self.intertwiner.apply(&seed);
        if phi.is_zero() {
            return Err(Error::KernelCheck { index: k, detail: "intertwiner image vanished".into() });
        }
        let residual = self.cleared.apply(&phi);
        if !residual.is_zero() {
            return Err(Error::KernelCheck { index: k, detail: format!("L[φ] = {residual}") });
        }
        Ok(phi)
    }
}

pub fn build_solution_basis(profile: &CoefficientProfile, z1: &CRat, count: usize) -> Result<SolutionBasis> {
    if count == 0 {
        return Err(Error::Invalid("basis count must be at least 1".into()));
    }
    let generator = BasisGenerator::new(profile, z1)?;
    let mut elements = vec![BivarPoly::one()];
    for k in 1..=count {
        let phi = generator.element(k)?;
        let conj = phi.conj();
        if !generator.cleared.apply(&conj).is_zero() {
            return Err(Error::KernelCheck { index: k, detail: "conjugate element not in kernel".into() });
        }
        elements.push(phi);
        elements.push(conj);
    }
    Ok(SolutionBasis { profile: profile.clone(), z1: z1.to_string(), elements })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Rat;

    fn p(s: &str) -> BivarPoly {
        BivarPoly::parse(s).unwrap()
    }

    #[test]
    fn constant_basis_is_monomial() {
        let z1 = CRat::parse("1/2+i").unwrap();
        let b = build_solution_basis(&CoefficientProfile::Constant, &z1, 3).unwrap();
        assert_eq!(b.elements.len(), 7);
        assert_eq!(b.phi(2), &BivarPoly::shifted_z_power(&z1, 2));
        assert_eq!(b.phi_conj(2), &BivarPoly::shifted_z_power(&z1, 2).conj());
    }

    #[test]
    fn power_x_n1_matches_closed_form() {
        let prof = CoefficientProfile::PowerX { n: 1, x1: Rat::new(5.into(), 3.into()) };
        let b = build_solution_basis(&prof, &CRat::zero(), 5).unwrap();
        for k in 1..=5u32 {
            let closed = p(&format!("{}*(z + zb + 10/3)*z^{k} - 2*z^{}", k + 1, k + 1));
            assert_eq!(b.phi(k as usize).scale(&CRat::int(2)), closed);
        }
    }

    #[test]
    fn rejects_source_on_singular_line() {
        let prof = CoefficientProfile::PowerX { n: 1, x1: Rat::from_integer(1.into()) };
        assert!(matches!(
            build_solution_basis(&prof, &CRat::parse("-1+2i").unwrap(), 2),
            Err(Error::SourceOnSingularSet(_))
        ));
        let g = CoefficientProfile::parse("gauge-trivial:h=z+zb+4").unwrap();
        assert!(matches!(build_solution_basis(&g, &CRat::zero(), 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn dihedral_basis_in_kernel() {
        let prof = CoefficientProfile::Dihedral { n: 2, l: 1, m: 2 };
        let b = build_solution_basis(&prof, &CRat::parse("2+1/3i").unwrap(), 3).unwrap();
        assert_eq!(b.elements.len(), 7);
    }
}
