use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::BivarPoly;
use crate::error::{Error, Result};
use crate::geometry::FloatMap;
use crate::moments::{moment_float, moment_rate};
use crate::operators::CoefficientProfile;

pub const MAX_NEWTON_ITERATIONS: usize = 50;
pub const NEWTON_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Inversion {
    pub map: FloatMap,
    pub iterations: usize,
    pub residual: f64,
}

/// `M[(z − z1)^k] / π` for `k = 0..count`.
pub fn centered_moments(map: &FloatMap, count: usize) -> Vec<Complex64> {
    let local = FloatMap::new(Complex64::new(0.0, 0.0), map.r, map.u.clone());
    let one = BivarPoly::one();
    (0..count as u32).map(|k| moment_float(&local, &one, &BivarPoly::monomial(1.into(), k, 0))).collect()
}

fn residual(map: &FloatMap, targets: &[Complex64]) -> Vec<f64> {
    let m = centered_moments(map, targets.len());
    let mut f = vec![m[0].re - targets[0].re];
    for k in 1..targets.len() {
        f.push(m[k].re - targets[k].re);
        f.push(m[k].im - targets[k].im);
    }
    f
}

fn jacobian(map: &FloatMap, s: usize) -> DMatrix<f64> {
    let n = 2 * s - 1;
    let z = FloatMap::new(Complex64::new(0.0, 0.0), map.r, map.u.clone()).laurent();
    let one = BivarPoly::one();
    let mut j = DMatrix::zeros(n, n);
    for col in 0..n {
        let mut u = vec![Complex64::new(0.0, 0.0); s - 1];
        let mut r = 0.0;
        if col == 0 {
            r = 1.0;
        } else {
            u[(col - 1) / 2] = if col % 2 == 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
        }
        let dir = FloatMap::new(Complex64::new(0.0, 0.0), r, u).laurent();
        for k in 0..s {
            let d = moment_rate(&z, &dir, &one, &BivarPoly::monomial(1.into(), k as u32, 0));
            if k == 0 {
                j[(0, col)] = d.re;
            } else {
                j[(2 * k - 1, col)] = d.re;
                j[(2 * k, col)] = d.im;
            }
        }
    }
    j
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Recovers a degree-`s` map from the moments `M[(z − z1)^k] / π`,
/// `k = 0..s`, by Newton's method from `guess`. Only `Re` of the zeroth
/// target is used, giving `2s − 1` real equations. The centre `z1` is taken
/// from `guess`.
pub fn invert_moments(profile: &CoefficientProfile, targets: &[Complex64], guess: &FloatMap) -> Result<Inversion> {
    if *profile != CoefficientProfile::Constant {
        return Err(Error::Unsupported(format!("{profile} (moment inversion)")));
    }
    let s = targets.len();
    if s == 0 {
        return Err(Error::Invalid("at least one target moment is required".into()));
    }
    let mut map = guess.clone();
    map.u.resize(s - 1, Complex64::new(0.0, 0.0));
    let scale = targets.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let tol = NEWTON_TOLERANCE * scale;
    let mut f = residual(&map, targets);
    let mut fnorm = norm(&f);
    for it in 0..MAX_NEWTON_ITERATIONS {
        if fnorm <= tol {
            return Ok(Inversion { map, iterations: it, residual: fnorm });
        }
        let j = jacobian(&map, s);
        let delta = j.lu().solve(&-DVector::from_vec(f.clone())).ok_or(Error::JacobianSingular)?;
        if delta.iter().any(|x| !x.is_finite()) {
            return Err(Error::JacobianSingular);
        }
        // Backtrack until the residual decreases and r stays positive.
        let params = map.params();
        let mut step = 1.0;
        loop {
            let trial: Vec<f64> = params.iter().zip(delta.iter()).map(|(p, d)| p + step * d).collect();
            let candidate = FloatMap::from_params(map.z1, &trial);
            if candidate.r > 0.0 {
                let fc = residual(&candidate, targets);
                let nc = norm(&fc);
                if nc < fnorm || step < 1e-6 {
                    map = candidate;
                    f = fc;
                    fnorm = nc;
                    break;
                }
            }
            step /= 2.0;
            if step < 1e-6 {
                return Err(Error::NoConvergence { iterations: it + 1, residual: fnorm });
            }
        }
    }
    if fnorm <= tol {
        return Ok(Inversion { map, iterations: MAX_NEWTON_ITERATIONS, residual: fnorm });
    }
    Err(Error::NoConvergence { iterations: MAX_NEWTON_ITERATIONS, residual: fnorm })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_from_area() {
        let guess = FloatMap::new(c(0.0, 0.0), 1.0, vec![c(0.1, 0.0)]);
        let inv = invert_moments(&CoefficientProfile::Constant, &[c(2.0, 0.0), c(0.0, 0.0)], &guess).unwrap();
        assert!((inv.map.r - 2f64.sqrt()).abs() < 1e-12);
        assert!(inv.map.u[0].norm() < 1e-12);
    }

    #[test]
    fn round_trip() {
        let truth = FloatMap::new(c(0.3, -0.1), 1.0, vec![c(0.3, 0.0), c(0.1, 0.0)]);
        let targets = centered_moments(&truth, 3);
        let guess = FloatMap::new(c(0.3, -0.1), 1.1, vec![c(0.27, 0.02), c(0.11, -0.01)]);
        let inv = invert_moments(&CoefficientProfile::Constant, &targets, &guess).unwrap();
        assert!((inv.map.r - 1.0).abs() < 1e-9);
        for (a, b) in inv.map.u.iter().zip(&truth.u) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn non_constant_rejected() {
        let p = CoefficientProfile::parse("power-x:n=1,x1=1").unwrap();
        let g = FloatMap::new(c(0.0, 0.0), 1.0, vec![]);
        assert!(matches!(invert_moments(&p, &[c(1.0, 0.0)], &g), Err(Error::Unsupported(_))));
    }
}
