use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{rat_to_f64, BivarPoly};
use crate::operators::CoefficientProfile;

use super::boundary::sample_boundary;
use super::map::FloatMap;

/// Outcome of [`check_univalence`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnivalenceReport {
    pub univalent: bool,
    /// Minimum `|z'(w)|` over the sample grid.
    pub min_abs_derivative: f64,
    /// Point `w` where the check failed, or where `|z'|` is smallest.
    pub witness: (f64, f64),
    pub detail: String,
}

/// Numerical univalence check on the closed unit disk.
///
/// Requires `z' ≠ 0` on a radial × angular grid (`n_samples` angles, a quarter
/// as many radii), zero winding of `z'` around the origin along the boundary,
/// a simple boundary polyline and positive orientation.
pub fn check_univalence(map: &FloatMap, n_samples: usize) -> UnivalenceReport {
    let n_theta = n_samples.max(64);
    let n_rho = (n_theta / 4).max(16);
    let mut min_abs = f64::INFINITY;
    let mut witness = Complex64::new(0.0, 0.0);
    for i in 0..=n_rho {
        let rho = i as f64 / n_rho as f64;
        let count = if i == 0 { 1 } else { n_theta };
        for j in 0..count {
            let w = Complex64::from_polar(rho, 2.0 * PI * j as f64 / n_theta as f64);
            let d = map.eval_derivative(w).norm();
            if d < min_abs {
                min_abs = d;
                witness = w;
            }
        }
    }
    let report = |ok: bool, w: Complex64, detail: String| UnivalenceReport {
        univalent: ok,
        min_abs_derivative: min_abs,
        witness: (w.re, w.im),
        detail,
    };
    if !map.r.is_finite() || map.r <= 0.0 {
        return report(false, witness, format!("r = {} is not positive", map.r));
    }
    let scale = map.coeffs().iter().skip(1).map(|c| c.norm()).fold(0.0, f64::max);
    if min_abs <= 1e-12 * scale {
        return report(false, witness, format!("z' vanishes near w = {witness}"));
    }
    let winding = derivative_winding(map, 4 * n_theta);
    if winding != 0 {
        return report(false, witness, format!("z' has {winding} zero(s) inside the unit disk"));
    }
    let curve = sample_boundary(map, n_theta);
    if let Some((i, j)) = curve.first_self_intersection() {
        let w = Complex64::from_polar(1.0, curve.samples[i].0);
        return report(false, w, format!("boundary segments {i} and {j} intersect"));
    }
    if curve.signed_area() <= 0.0 {
        return report(false, witness, "boundary is not positively oriented".into());
    }
    report(true, witness, format!("min |z'| = {min_abs:.6e}"))
}

/// Winding number of `z'(e^{iθ})` around the origin; equals the number of
/// zeros of `z'` in the open disk when none lie on the circle.
fn derivative_winding(map: &FloatMap, n: usize) -> i64 {
    let mut total = 0.0;
    let mut prev = map.eval_derivative(Complex64::new(1.0, 0.0));
    for j in 1..=n {
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        let cur = map.eval_derivative(w);
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i64
}

/// Minimum distance from the mapped closed disk to the singular set of
/// `profile`; zero when the domain meets or straddles it, `+∞` when the set is
/// empty.
pub fn singular_set_clearance(map: &FloatMap, profile: &CoefficientProfile) -> f64 {
    let points = domain_samples(map, 256, 32);
    match profile {
        CoefficientProfile::Constant => f64::INFINITY,
        CoefficientProfile::PowerX { x1, .. } => {
            let x1 = rat_to_f64(x1);
            line_clearance(&points, |z| z.re + x1)
        }
        CoefficientProfile::Dihedral { m, .. } => {
            // 2m mirror lines through the origin, at angles jπ/(2m).
            (0..2 * m)
                .map(|j| {
                    let dir = Complex64::from_polar(1.0, -(j as f64) * PI / (2.0 * *m as f64));
                    line_clearance(&points, |z| (z * dir).im)
                })
                .fold(f64::INFINITY, f64::min)
        }
        CoefficientProfile::GaugeTrivial { h, .. } => harmonic_clearance(&points, h),
    }
}

fn line_clearance<F: Fn(Complex64) -> f64>(points: &[Complex64], signed: F) -> f64 {
    let mut min = f64::INFINITY;
    let (mut pos, mut neg) = (false, false);
    for &z in points {
        let d = signed(z);
        pos |= d > 0.0;
        neg |= d < 0.0;
        min = min.min(d.abs());
    }
    if pos && neg {
        0.0
    } else {
        min
    }
}

/// First-order distance estimate `|h| / |∇h|` to the zero set of real `h`.
fn harmonic_clearance(points: &[Complex64], h: &BivarPoly) -> f64 {
    let hz = h.d_z();
    let mut min = f64::INFINITY;
    let (mut pos, mut neg) = (false, false);
    for &z in points {
        let v = h.eval_c64(z).re;
        pos |= v > 0.0;
        neg |= v < 0.0;
        let grad = 2.0 * hz.eval_c64(z).norm();
        let est = if grad > 0.0 { v.abs() / grad } else if v == 0.0 { 0.0 } else { f64::INFINITY };
        min = min.min(est);
    }
    if pos && neg {
        0.0
    } else {
        min
    }
}

fn domain_samples(map: &FloatMap, n_theta: usize, n_rho: usize) -> Vec<Complex64> {
    let mut out = vec![map.eval(Complex64::new(0.0, 0.0))];
    for i in 1..=n_rho {
        let rho = i as f64 / n_rho as f64;
        for j in 0..n_theta {
            out.push(map.eval(Complex64::from_polar(rho, 2.0 * PI * j as f64 / n_theta as f64)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(z1: f64, r: f64, u: &[f64]) -> FloatMap {
        FloatMap::new(Complex64::new(z1, 0.0), r, u.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    #[test]
    fn univalence_examples() {
        assert!(check_univalence(&fm(0.0, 1.0, &[]), 256).univalent);
        let cusp = check_univalence(&fm(0.0, 1.0, &[1.0]), 256);
        assert!(!cusp.univalent);
        assert!(cusp.min_abs_derivative < 1e-12);
        let ok = check_univalence(&fm(0.0, 1.0, &[0.0, 0.1]), 256);
        assert!(ok.univalent);
        assert!(ok.min_abs_derivative >= 0.7 - 1e-12);
        // z' = 1 + 1.2 w vanishes inside the disk without touching the grid.
        assert!(!check_univalence(&fm(0.0, 1.0, &[0.6]), 64).univalent);
    }

    #[test]
    fn clearance_examples() {
        let disk = fm(1.0, 0.5, &[]);
        let px = CoefficientProfile::parse("power-x:n=1,x1=0").unwrap();
        assert!((singular_set_clearance(&disk, &px) - 0.5).abs() < 1e-12);
        let dh = CoefficientProfile::parse("dihedral:n=1,l=0,m=1").unwrap();
        assert_eq!(singular_set_clearance(&disk, &dh), 0.0);
        assert_eq!(singular_set_clearance(&fm(2.0, 1.0, &[]), &CoefficientProfile::Constant), f64::INFINITY);
        let shifted = CoefficientProfile::parse("power-x:n=1,x1=3").unwrap();
        assert!((singular_set_clearance(&disk, &shifted) - 3.5).abs() < 1e-12);
    }
}
