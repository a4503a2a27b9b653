//! Conserved functionals `M[φ] = ∫_Ω η φ dX dY` by residue calculus.
//!
//! All values are returned as multiples of `π`.

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{compose_boundary, format_rat, power_table, BivarPoly, CRat, Laurent, Scalar};
use crate::geometry::{ConformalMap, FloatMap};

/// Moment value with the factor `π` removed.
#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Exact(CRat),
    Numeric(Complex64),
}

impl MomentValue {
    pub fn tag(&self) -> &'static str {
        match self {
            MomentValue::Exact(_) => "exact",
            MomentValue::Numeric(_) => "numeric",
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            MomentValue::Exact(c) => c.to_c64(),
            MomentValue::Numeric(c) => *c,
        }
    }
}

/// JSON form `{phi, value_pi_multiple, tag}` of a moment.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub phi: BivarPoly,
    pub value_pi_multiple: String,
    pub tag: String,
}

impl MomentReport {
    pub fn new(phi: BivarPoly, value: &MomentValue) -> Self {
        let value_pi_multiple = match value {
            MomentValue::Exact(c) if c.is_real() => format_rat(&c.re),
            MomentValue::Exact(c) => c.to_string(),
            MomentValue::Numeric(c) => format!("{:.17e}{:+.17e}i", c.re, c.im),
        };
        MomentReport { phi, value_pi_multiple, tag: value.tag().into() }
    }
}

/// Residues `Res(z^a z' · z̄(1/w)^b)` for all `a <= max_a`, `b <= max_b`.
///
/// `∫_Ω z^a z̄^b dX dY = π · table(a, b + 1) / (b + 1)`; precomputing the table
/// makes every later moment a dot product.
#[derive(Clone, Debug)]
pub struct MomentTable<S: Scalar> {
    table: Vec<Vec<S>>,
}

impl<S: Scalar> MomentTable<S> {
    /// Table sufficient for integrands of `z`-degree `<= max_a` and `z̄`-degree `<= max_b`.
    pub fn new(z: &Laurent<S>, max_a: u32, max_b: u32) -> Self {
        let dz = z.derivative();
        let zp = power_table(z, max_a);
        let zb = power_table(&z.reflect(), max_b + 1);
        let table = zp
            .iter()
            .map(|za| {
                let left = za * &dz;
                zb.iter().map(|zbb| left.residue_of_product(zbb)).collect()
            })
            .collect();
        MomentTable { table }
    }

    pub fn max_a(&self) -> u32 {
        self.table.len() as u32 - 1
    }

    pub fn max_b(&self) -> u32 {
        self.table[0].len() as u32 - 2
    }

    /// `∫_Ω f dX dY / π`. Panics if `f` exceeds the table's degree bounds.
    pub fn integrate(&self, f: &BivarPoly) -> S {
        let mut acc = S::zero();
        for (m, c) in f.terms() {
            assert!(
                m.a <= self.max_a() && m.b <= self.max_b(),
                "moment table too small for z^{} z̄^{}",
                m.a,
                m.b
            );
            let r = self.table[m.a as usize][m.b as usize + 1].clone();
            let k = CRat::frac(1, m.b as i64 + 1);
            acc = acc + r * &S::from_crat(&(c * &k));
        }
        acc
    }

    /// `M[φ] / π` with weight `η`.
    pub fn moment(&self, eta: &BivarPoly, phi: &BivarPoly) -> S {
        self.integrate(&(eta * phi))
    }
}

/// `M[φ] / π = Res(ξ(z(w), z̄(1/w)) z'(w))` with `∂_z̄ ξ = η φ`.
pub fn moment_exact(map: &ConformalMap, eta: &BivarPoly, phi: &BivarPoly) -> CRat {
    moment_generic(&map.laurent(), eta, phi)
}

/// Floating-point evaluation of the same residue formula.
pub fn moment_float(map: &FloatMap, eta: &BivarPoly, phi: &BivarPoly) -> Complex64 {
    moment_generic(&map.laurent(), eta, phi)
}

fn moment_generic<S: Scalar>(z: &Laurent<S>, eta: &BivarPoly, phi: &BivarPoly) -> S {
    let xi = (eta * phi).antiderivative_zbar();
    let boundary = compose_boundary(&xi, z, &z.reflect());
    boundary.residue_of_product(&z.derivative())
}

/// `{z, z̄} = w z_w z̄_t − w z̄_w z_t` on the unit circle.
pub fn poisson_bracket<S: Scalar>(zc: &Laurent<S>, zc_dot: &Laurent<S>, zb: &Laurent<S>, zb_dot: &Laurent<S>) -> Laurent<S> {
    let a = &zc.euler_derivative() * zb_dot;
    let b = &zb.euler_derivative() * zc_dot;
    &a - &b
}

/// `(dM[φ]/dt) / π = Res(φ η {z, z̄} / w)` for the velocity field `z_t(w)`.
pub fn moment_rate<S: Scalar>(z: &Laurent<S>, z_dot: &Laurent<S>, eta: &BivarPoly, phi: &BivarPoly) -> S {
    let zb = z.reflect();
    let bracket = poisson_bracket(z, z_dot, &zb, &z_dot.reflect());
    let f = compose_boundary(&(eta * phi), z, &zb);
    // Res(f · bracket / w) is the constant term of f · bracket.
    f.residue_of_product(&bracket.shift(-1))
}
