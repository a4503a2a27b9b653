use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::algebra::{compose_boundary, BivarPoly, Laurent};
use crate::error::{Error, Result};
use crate::geometry::FloatMap;
use crate::moments::poisson_bracket;

/// Condition numbers above this are treated as a singular velocity system.
pub const MAX_CONDITION: f64 = 1e12;

/// Right-hand side of the boundary evolution `{z, z̄} = target`.
#[derive(Clone, Debug, PartialEq)]
pub enum VelocityField {
    /// `{z, z̄} = 1`.
    PolubarinovaGalin,
    /// `{z, z̄} = h(z, z̄)`, Galerkin-truncated to maps of degree `truncation`.
    String { h: BivarPoly, truncation: usize },
}

impl VelocityField {
    pub fn velocities(&self, map: &FloatMap) -> Result<Velocities> {
        match self {
            VelocityField::PolubarinovaGalin => pg_velocities(map),
            VelocityField::String { h, truncation } => string_velocities(map, h, *truncation),
        }
    }

    /// Degree at which the field evolves a map.
    pub fn working_degree(&self, map: &FloatMap) -> usize {
        match self {
            VelocityField::PolubarinovaGalin => map.degree(),
            VelocityField::String { truncation, .. } => (*truncation).max(map.degree()),
        }
    }
}

/// Coefficient velocities `ż(w)` for unit source strength.
#[derive(Clone, Debug, PartialEq)]
pub struct Velocities {
    /// `ż` stored as a map with `z1 = 0`: `r` holds `ṙ`, `u` holds `u̇_k`.
    pub rate: FloatMap,
    /// 2-norm condition number of the real velocity system.
    pub condition: f64,
    /// Norm of the target's Laurent coefficients outside the tracked range.
    pub truncation_residual: f64,
    /// `sup |{z, z̄} − target|` over 64 roots of unity, on the tracked range.
    pub bracket_residual: f64,
}

/// Velocities of the Polubarinova–Galin equation `{z, z̄} = 1`.
pub fn pg_velocities(map: &FloatMap) -> Result<Velocities> {
    solve_bracket(map, &Laurent::one())
}

/// Velocities of the string constraint `{z, z̄} = h`, with the map padded to
/// degree `truncation`.
pub fn string_velocities(map: &FloatMap, h: &BivarPoly, truncation: usize) -> Result<Velocities> {
    if truncation < map.degree() {
        return Err(Error::Invalid(format!(
            "truncation {truncation} is below the map degree {}",
            map.degree()
        )));
    }
    let mut padded = map.clone();
    padded.u.resize(truncation - 1, Complex64::new(0.0, 0.0));
    let z = padded.laurent();
    let target = compose_boundary(h, &z, &z.reflect());
    solve_bracket(&padded, &target)
}

/// Direction in coefficient space for real unknown `j` of a degree-`s` map.
fn direction(s: usize, j: usize) -> FloatMap {
    let mut u = vec![Complex64::new(0.0, 0.0); s - 1];
    let mut r = 0.0;
    if j == 0 {
        r = 1.0;
    } else {
        let k = (j - 1) / 2;
        u[k] = if j % 2 == 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 1.0) };
    }
    FloatMap::new(Complex64::new(0.0, 0.0), r, u)
}

/// Bracket `{z, z̄}` for the velocity field `z_dot`.
pub fn bracket(map: &FloatMap, z_dot: &FloatMap) -> Laurent<Complex64> {
    let z = map.laurent();
    let zd = z_dot.laurent();
    poisson_bracket(&z, &zd, &z.reflect(), &zd.reflect())
}

/// Real equations from Laurent coefficients `w^0..w^{s−1}`.
fn equations(l: &Laurent<Complex64>, s: usize) -> Vec<f64> {
    let mut v = vec![l.coeff(0).re];
    for k in 1..s as i64 {
        let c = l.coeff(k);
        v.push(c.re);
        v.push(c.im);
    }
    v
}

fn solve_bracket(map: &FloatMap, target: &Laurent<Complex64>) -> Result<Velocities> {
    let s = map.degree();
    let n = 2 * s - 1;
    let mut a = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let col = equations(&bracket(map, &direction(s, j)), s);
        for (i, v) in col.into_iter().enumerate() {
            a[(i, j)] = v;
        }
    }
    let b = DVector::from_vec(equations(target, s));
    let sv = a.clone().svd(false, false).singular_values;
    let (smax, smin) = (sv.max(), sv.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularVelocitySystem { condition });
    }
    let x = a.lu().solve(&b).ok_or(Error::SingularVelocitySystem { condition })?;
    let mut rate = FloatMap::new(Complex64::new(0.0, 0.0), x[0], Vec::with_capacity(s - 1));
    for k in 0..s - 1 {
        rate.u.push(Complex64::new(x[1 + 2 * k], x[2 + 2 * k]));
    }
    let truncation_residual = target
        .terms()
        .filter(|(p, _)| p.unsigned_abs() as usize >= s)
        .map(|(_, c)| c.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let tracked = Laurent::from_terms(target.terms().filter(|(p, _)| (p.unsigned_abs() as usize) < s).map(|(p, c)| (*p, *c)));
    let bracket_residual = sup_on_circle(&(&bracket(map, &rate) - &tracked), 64);
    Ok(Velocities { rate, condition, truncation_residual, bracket_residual })
}

/// `sup |f|` over the `n`-th roots of unity.
pub fn sup_on_circle(f: &Laurent<Complex64>, n: usize) -> f64 {
    (0..n)
        .map(|j| f.eval(&Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn disk_law() {
        let v = pg_velocities(&FloatMap::new(c(0.0, 0.0), 1.5, vec![])).unwrap();
        assert!((v.rate.r - 1.0 / 3.0).abs() < 1e-15);
        assert!(v.bracket_residual < 1e-14);
    }

    #[test]
    fn bracket_is_one() {
        let map = FloatMap::new(c(0.0, 0.0), 1.0, vec![c(0.1, 0.05), c(-0.02, 0.03)]);
        let v = pg_velocities(&map).unwrap();
        assert_eq!(v.rate.degree(), 3);
        assert!(v.bracket_residual < 1e-13);
        assert_eq!(v.truncation_residual, 0.0);
    }

    #[test]
    fn constant_string_is_pg() {
        let map = FloatMap::new(c(0.0, 0.0), 0.8, vec![c(0.1, 0.0)]);
        let pg = pg_velocities(&map).unwrap();
        let st = string_velocities(&map, &BivarPoly::one(), 2).unwrap();
        assert!((pg.rate.r - st.rate.r).abs() < 1e-15);
        assert!((pg.rate.u[0] - st.rate.u[0]).norm() < 1e-15);
    }

    #[test]
    fn linear_string_has_residual() {
        let h = BivarPoly::parse("z + zb").unwrap();
        let map = FloatMap::new(c(1.0, 0.0), 0.1, vec![]);
        // The disk ansatz leaves the w^{±1} terms of h untracked.
        let v = string_velocities(&map, &h, 1).unwrap();
        assert!((v.truncation_residual - 0.1 * 2f64.sqrt()).abs() < 1e-15);
        assert!(v.bracket_residual < 1e-12);
        // Padding to a higher degree tracks them while the top coefficient vanishes.
        assert_eq!(string_velocities(&map, &h, 4).unwrap().truncation_residual, 0.0);
    }

    #[test]
    fn cusp_is_singular() {
        let map = FloatMap::new(c(0.0, 0.0), 1.0, vec![c(0.5, 0.0)]);
        assert!(matches!(pg_velocities(&map), Err(Error::SingularVelocitySystem { .. })));
    }
}
