use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{rat_int, BivarPoly, CRat};
use crate::error::Result;
use crate::operators::BasisGenerator;
use crate::oracle::{oracle_moment, QuadratureRule};

use super::{evaluate_rhs, MomentOracle, QuadratureIdentity};

/// Default relative tolerance for oracle agreement.
pub const ORACLE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactCheck {
    pub order: usize,
    pub conjugate: bool,
    /// `M[φ]/π − rhs(φ)/π`, exactly.
    pub residual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleCheck {
    pub index: usize,
    pub identity_re: f64,
    pub identity_im: f64,
    pub oracle_re: f64,
    pub oracle_im: f64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub exact: Vec<ExactCheck>,
    pub oracle: Vec<OracleCheck>,
    pub oracle_nr: usize,
    pub oracle_ntheta: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub rule: QuadratureRule,
    pub tolerance: f64,
    pub random_functions: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { rule: QuadratureRule::default(), tolerance: ORACLE_TOLERANCE, random_functions: 6, seed: 0 }
    }
}

/// Highest basis order covered by the exact checks.
fn checked_orders(identity: &QuadratureIdentity) -> usize {
    identity.orders_used.max(identity.order() + 1) + identity.held_out_checked
}

/// Re-checks `identity` exactly on every basis element and its conjugate up to
/// the held-out range, then against the floating oracle on random
/// combinations of those elements.
pub fn verify_identity(identity: &QuadratureIdentity, opts: &VerifyOptions) -> Result<VerificationReport> {
    let generator = BasisGenerator::new(&identity.profile, &identity.z1)?;
    let eta = identity.profile.eta();
    let top = checked_orders(identity);
    let mut elements = Vec::with_capacity(2 * top + 1);
    let mut exact = Vec::new();
    let mut moments = MomentOracle::new(&identity.map, eta.clone());
    for order in 0..=top {
        let phi = generator.element(order)?;
        let variants = if order == 0 { vec![(false, phi)] } else { vec![(false, phi.clone()), (true, phi.conj())] };
        for (conjugate, f) in variants {
            let res = &moments.moment(&f) - &evaluate_rhs(identity, &f);
            exact.push(ExactCheck { order, conjugate, residual: res.to_string(), pass: res.is_zero() });
            elements.push(f);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let fmap = identity.map.to_float();
    let mut oracle = Vec::with_capacity(opts.random_functions);
    for index in 0..opts.random_functions {
        let mut phi = BivarPoly::zero();
        for e in &elements {
            let c = CRat::new(rat_int(rng.random_range(-3..=3)), rat_int(rng.random_range(-3..=3)));
            phi = &phi + &e.scale(&c);
        }
        let expected = evaluate_rhs(identity, &phi).to_c64();
        let got = oracle_moment(&fmap, &opts.rule, &eta, &phi)?;
        let relative_error = relative(expected, got);
        oracle.push(OracleCheck {
            index,
            identity_re: expected.re,
            identity_im: expected.im,
            oracle_re: got.re,
            oracle_im: got.im,
            relative_error,
            pass: relative_error <= opts.tolerance,
        });
    }
    let passed = exact.iter().all(|c| c.pass) && oracle.iter().all(|c| c.pass);
    Ok(VerificationReport {
        exact,
        oracle,
        oracle_nr: opts.rule.n_r,
        oracle_ntheta: opts.rule.n_theta,
        tolerance: opts.tolerance,
        seed: opts.seed,
        passed,
    })
}

fn relative(expected: Complex64, got: Complex64) -> f64 {
    let err = (expected - got).norm();
    if expected.norm() > 0.0 {
        err / expected.norm()
    } else {
        err
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::geometry::ConformalMap;
    use crate::operators::CoefficientProfile;
    use crate::quad_solver::construct_identity;

    #[test]
    fn fresh_identity_verifies() {
        let prof = CoefficientProfile::power_x(1, rat(1, 2)).unwrap();
        let map = ConformalMap::parse("z1=1;r=1/2;u=1/20").unwrap();
        let id = construct_identity(&prof, &map).unwrap();
        let rep = verify_identity(&id, &VerifyOptions::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert_eq!(rep.oracle.len(), 6);
    }

    #[test]
    fn corrupted_identity_fails() {
        let prof = CoefficientProfile::power_x(1, rat(1, 2)).unwrap();
        let map = ConformalMap::parse("z1=1;r=1/2").unwrap();
        let mut id = construct_identity(&prof, &map).unwrap();
        id.q[0] = &id.q[0] + &CRat::frac(1, 1000);
        let rep = verify_identity(&id, &VerifyOptions::default()).unwrap();
        assert!(!rep.passed);
        assert!(rep.exact.iter().any(|c| !c.pass));
        assert!(rep.oracle.iter().any(|c| !c.pass));
    }
}
