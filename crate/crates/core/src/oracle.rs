//! Independent floating-point checks: tensor quadrature over the mapped disk
//! and finite-difference residuals of the divergence-form operator.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::{BivarPoly, CRat, Rat};
use crate::error::{Error, Result};
use crate::geometry::FloatMap;
use crate::operators::CoefficientProfile;

pub const DEFAULT_NR: usize = 48;
pub const DEFAULT_NTHETA: usize = 256;

/// Gauss–Legendre in the radius (on `[0, 1]`) times the trapezoid rule in angle.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub n_r: usize,
    pub n_theta: usize,
    /// Radial nodes on `[0, 1]`.
    pub nodes: Vec<f64>,
    /// Radial weights including the Jacobian factor `ρ`.
    pub weights: Vec<f64>,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule::new(DEFAULT_NR, DEFAULT_NTHETA)
    }
}

impl QuadratureRule {
    pub fn new(n_r: usize, n_theta: usize) -> Self {
        assert!(n_r >= 1 && n_theta >= 1, "node counts must be positive");
        let (x, w) = gauss_legendre(n_r);
        let nodes: Vec<f64> = x.iter().map(|t| 0.5 * (t + 1.0)).collect();
        let weights = w.iter().zip(&nodes).map(|(wi, rho)| 0.5 * wi * rho).collect();
        QuadratureRule { n_r, n_theta, nodes, weights }
    }

    /// `∫∫_{|w|<=1} g(w) dA_w`.
    pub fn integrate_disk<F: FnMut(Complex64) -> Result<Complex64>>(&self, mut g: F) -> Result<Complex64> {
        let dtheta = 2.0 * PI / self.n_theta as f64;
        let mut total = Complex64::new(0.0, 0.0);
        for (rho, wr) in self.nodes.iter().zip(&self.weights) {
            let mut ring = Complex64::new(0.0, 0.0);
            for j in 0..self.n_theta {
                let w = Complex64::from_polar(*rho, j as f64 * dtheta);
                let v = g(w)?;
                if !v.re.is_finite() || !v.im.is_finite() {
                    return Err(Error::NonFinite { re: w.re, im: w.im });
                }
                ring += v;
            }
            total += ring * (wr * dtheta);
        }
        Ok(total)
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, t);
            dp = d;
            let step = p / d;
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, t);
        dp = if d != 0.0 { d } else { dp };
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `(P_n(t), P_n'(t))` by the three-term recurrence.
fn legendre(n: usize, t: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, t);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (t * p1 - p0) / (t * t - 1.0);
    (p1, d)
}

/// `∫∫_{|w|<=1} F(z(w)) |z'(w)|² dA_w`, the integral of `F` over the image domain.
pub fn integrate_over_domain<F: FnMut(Complex64) -> Complex64>(
    map: &FloatMap,
    rule: &QuadratureRule,
    mut f: F,
) -> Result<Complex64> {
    rule.integrate_disk(|w| {
        let jac = map.eval_derivative(w).norm_sqr();
        Ok(f(map.eval(w)) * jac)
    })
}

/// `∫_Ω η φ dX dY / π` by quadrature. The integrand is re-expanded about the
/// map's centre before evaluation, which avoids cancellation for polynomials of
/// high degree.
pub fn oracle_moment(map: &FloatMap, rule: &QuadratureRule, eta: &BivarPoly, phi: &BivarPoly) -> Result<Complex64> {
    let center = rational_approx(map.z1);
    let z1 = center.to_c64();
    let f = (eta * phi).recentered(&center);
    let terms = f.to_scalar_terms::<Complex64>();
    let ma = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
    let mb = terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
    let total = rule.integrate_disk(|w| {
        let zeta = map.eval(w) - z1;
        let jac = map.eval_derivative(w).norm_sqr();
        Ok(eval_terms(&terms, zeta, ma, mb) * jac)
    })?;
    Ok(total / PI)
}

fn eval_terms(terms: &[(u32, u32, Complex64)], zeta: Complex64, ma: usize, mb: usize) -> Complex64 {
    let mut zp = vec![Complex64::new(1.0, 0.0); ma + 1];
    for k in 1..=ma {
        zp[k] = zp[k - 1] * zeta;
    }
    let zc = zeta.conj();
    let mut zbp = vec![Complex64::new(1.0, 0.0); mb + 1];
    for k in 1..=mb {
        zbp[k] = zbp[k - 1] * zc;
    }
    terms.iter().map(|(a, b, c)| c * zp[*a as usize] * zbp[*b as usize]).sum()
}

/// Nearest rational with denominator `2^40` to each component.
pub fn rational_approx(z: Complex64) -> CRat {
    let den: i64 = 1 << 40;
    let q = |x: f64| Rat::new(((x * den as f64).round() as i64).into(), den.into());
    CRat::new(q(z.re), q(z.im))
}

/// Taylor coefficients `c[i][j]` of `Σ c_ab ζ^a ζ̄^b` about `ζ = delta`.
fn taylor_at(terms: &[(u32, u32, Complex64)], delta: Complex64, ma: usize, mb: usize) -> Vec<Vec<Complex64>> {
    let pow = |x: Complex64, n: usize| (0..=n).scan(Complex64::new(1.0, 0.0), |acc, k| {
        let v = *acc;
        if k < n {
            *acc *= x;
        }
        Some(v)
    }).collect::<Vec<_>>();
    let dp = pow(delta, ma);
    let dbp = pow(delta.conj(), mb);
    let n = ma.max(mb);
    let mut binom = vec![vec![0.0f64; n + 1]; n + 1];
    for a in 0..=n {
        binom[a][0] = 1.0;
        for i in 1..=a {
            binom[a][i] = binom[a - 1][i - 1] + if i < a { binom[a - 1][i] } else { 0.0 };
        }
    }
    let mut c = vec![vec![Complex64::new(0.0, 0.0); mb + 1]; ma + 1];
    for &(a, b, coef) in terms {
        let (a, b) = (a as usize, b as usize);
        for i in 0..=a {
            let ci = coef * binom[a][i] * dp[a - i];
            for j in 0..=b {
                c[i][j] += ci * binom[b][j] * dbp[b - j];
            }
        }
    }
    c
}

/// Maximum over `points` of the five-point finite-difference value of
/// `∇·(κη∇φ) / (κη)`, divided by `max(1, sup |φ|)`. Differences
/// `φ(p ± d) − φ(p)` are summed from the Taylor coefficients at `p`, so the
/// constant term cancels exactly.
pub fn pde_residual(profile: &CoefficientProfile, phi: &BivarPoly, points: &[Complex64], h: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let centroid = points.iter().sum::<Complex64>() / points.len() as f64;
    let center = rational_approx(centroid);
    let c = center.to_c64();
    let f = phi.recentered(&center);
    let terms = f.to_scalar_terms::<Complex64>();
    let ma = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
    let mb = terms.iter().map(|t| t.1).max().unwrap_or(0) as usize;
    let k = |z: Complex64| profile.kappa_eta(z);
    let mut worst: f64 = 0.0;
    let mut sup: f64 = 0.0;
    for &p in points {
        let local = taylor_at(&terms, p - c, ma, mb);
        sup = sup.max(local[0][0].norm());
        let diff = |d: Complex64| {
            let mut acc = Complex64::new(0.0, 0.0);
            let db = d.conj();
            let mut di = Complex64::new(1.0, 0.0);
            for (i, row) in local.iter().enumerate() {
                let mut dj = Complex64::new(1.0, 0.0);
                for (j, cij) in row.iter().enumerate() {
                    if i + j > 0 {
                        acc += cij * di * dj;
                    }
                    dj *= db;
                }
                di *= d;
            }
            acc
        };
        let mut flux = Complex64::new(0.0, 0.0);
        for d in [Complex64::new(h, 0.0), Complex64::new(0.0, h)] {
            flux += diff(d) * k(p + d * 0.5) + diff(-d) * k(p - d * 0.5);
        }
        let r = flux / (h * h * k(p));
        worst = worst.max(r.norm());
    }
    worst / sup.max(1.0)
}
