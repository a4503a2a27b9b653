use crate::algebra::{BivarPoly, CRat, Rat};
use crate::error::Result;

use super::diffop::DiffOperator;
use super::profile::CoefficientProfile;

/// `z^m + z̄^m`.
pub fn mirror_a(m: u32) -> BivarPoly {
    &BivarPoly::monomial(CRat::one(), m, 0) + &BivarPoly::monomial(CRat::one(), 0, m)
}

/// `z^m - z̄^m`.
pub fn mirror_b(m: u32) -> BivarPoly {
    &BivarPoly::monomial(CRat::one(), m, 0) - &BivarPoly::monomial(CRat::one(), 0, m)
}

/// The polynomial `F` with `D = F · L`, where `D` is the operator returned by
/// [`build_elliptic_operator`].
pub fn clearing_factor(profile: &CoefficientProfile) -> BivarPoly {
    match profile {
        CoefficientProfile::Constant => BivarPoly::one(),
        CoefficientProfile::GaugeTrivial { h, .. } => h.clone(),
        CoefficientProfile::PowerX { x1, .. } => power_x_line(x1).scale(&CRat::int(2)),
        CoefficientProfile::Dihedral { m, .. } => &mirror_a(*m) * &mirror_b(*m),
    }
}

/// `X + x1 = (z + z̄)/2 + x1`.
pub(crate) fn power_x_line(x1: &Rat) -> BivarPoly {
    let half = CRat::frac(1, 2);
    BivarPoly::from_terms([(1, 0, half.clone()), (0, 1, half), (0, 0, CRat::real(x1.clone()))])
}

/// Returns the elliptic operator of `profile` with denominators cleared.
///
/// Constant gives `2∂∂̄`; PowerX gives `(z+z̄+2x1)·2∂∂̄ − 2n(∂+∂̄)`; Dihedral
/// gives `(z^m+z̄^m)(z^m−z̄^m)` times the Calogero-type operator; GaugeTrivial
/// gives `2∂∂̄∘h`.
pub fn build_elliptic_operator(profile: &CoefficientProfile) -> Result<DiffOperator> {
    profile.validate()?;
    build_unchecked(profile)
}

pub(crate) fn build_unchecked(profile: &CoefficientProfile) -> Result<DiffOperator> {
    Ok(match profile {
        CoefficientProfile::Constant => DiffOperator::laplacian(),
        CoefficientProfile::GaugeTrivial { h, .. } => {
            DiffOperator::laplacian().compose(&DiffOperator::multiplication(h.clone()))
        }
        CoefficientProfile::PowerX { n, .. } => {
            let f = clearing_factor(profile);
            let mut op = DiffOperator::laplacian().premultiply(&f);
            let c = BivarPoly::constant(CRat::int(-2 * *n as i64));
            op.add_part(1, 0, c.clone());
            op.add_part(0, 1, c);
            op
        }
        CoefficientProfile::Dihedral { n, l, m } => {
            let (n, l, m) = (*n as i64, *l as i64, *m);
            let a = mirror_a(m);
            let b = mirror_b(m);
            let zm1 = BivarPoly::monomial(CRat::one(), m - 1, 0);
            let zbm1 = BivarPoly::monomial(CRat::one(), 0, m - 1);
            let mut op = DiffOperator::laplacian().premultiply(&(&a * &b));
            // -2nm·B·(z^{m-1}∂̄ + z̄^{m-1}∂)
            let cn = CRat::int(-2 * n * m as i64);
            op.add_part(0, 1, (&b * &zm1).scale(&cn));
            op.add_part(1, 0, (&b * &zbm1).scale(&cn));
            // -2lm·A·(z^{m-1}∂̄ − z̄^{m-1}∂)
            let cl = CRat::int(-2 * l * m as i64);
            op.add_part(0, 1, (&a * &zm1).scale(&cl));
            op.add_part(1, 0, (&a * &zbm1).scale(&cl).scale(&CRat::int(-1)));
            op
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BivarPoly {
        BivarPoly::parse(s).unwrap()
    }

    #[test]
    fn constant_is_laplacian() {
        let op = build_elliptic_operator(&CoefficientProfile::Constant).unwrap();
        assert_eq!(op, DiffOperator::from_part(1, 1, p("2")));
    }

    #[test]
    fn power_x_cleared_form() {
        let prof = CoefficientProfile::parse("power-x:n=1,x1=0").unwrap();
        let op = build_elliptic_operator(&prof).unwrap();
        let expect = DiffOperator::from_part(1, 1, p("2*z + 2*zb"))
            .add(&DiffOperator::from_part(1, 0, p("-2")))
            .add(&DiffOperator::from_part(0, 1, p("-2")));
        assert_eq!(op, expect);
    }

    #[test]
    fn dihedral_cleared_form_n1_m1() {
        let prof = CoefficientProfile::parse("dihedral:n=1,l=0,m=1").unwrap();
        let op = build_elliptic_operator(&prof).unwrap();
        let expect = DiffOperator::from_part(1, 1, p("2*z^2 - 2*zb^2"))
            .add(&DiffOperator::from_part(0, 1, p("-2*z + 2*zb")))
            .add(&DiffOperator::from_part(1, 0, p("-2*z + 2*zb")));
        assert_eq!(op, expect);
        // (z - z̄) is annihilated by L_{1,0;1}: it is Y up to a constant.
        assert!(op.apply(&p("z - zb")).is_zero());
    }

    #[test]
    fn rejects_invalid_dihedral() {
        let bad = CoefficientProfile::Dihedral { n: 1, l: 1, m: 1 };
        assert!(build_elliptic_operator(&bad).is_err());
    }

    #[test]
    fn gauge_trivial_kernel() {
        let prof = CoefficientProfile::parse("gauge-trivial:h=z+zb").unwrap();
        let op = build_elliptic_operator(&prof).unwrap();
        // h·1 is harmonic, h·z z̄ is not.
        assert!(op.apply(&p("1")).is_zero());
        assert!(!op.apply(&p("z*zb")).is_zero());
    }
}
