use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{format_rat, parse_rat, rat_to_f64, CRat, Laurent, LaurentPoly, Rat};
use crate::error::{Error, Result};

/// `z(w) = z1 + r w + Σ_{k=1}^{s−1} u_k w^(k+1)` with exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalMap {
    pub z1: CRat,
    pub r: Rat,
    pub u: Vec<CRat>,
}

/// Floating-point counterpart of [`ConformalMap`], used by the flow and the oracle.
#[derive(Clone, Debug, PartialEq)]
pub struct FloatMap {
    pub z1: Complex64,
    pub r: f64,
    pub u: Vec<Complex64>,
}

impl ConformalMap {
    pub fn new(z1: CRat, r: Rat, u: Vec<CRat>) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::InvalidMap(format!("r must be positive, got {}", format_rat(&r))));
        }
        let mut u = u;
        while u.last().is_some_and(|c| c.is_zero()) {
            u.pop();
        }
        Ok(ConformalMap { z1, r, u })
    }

    pub fn disk(z1: CRat, r: Rat) -> Result<Self> {
        ConformalMap::new(z1, r, Vec::new())
    }

    /// Polynomial degree `s`.
    pub fn degree(&self) -> usize {
        self.u.len() + 1
    }

    /// Coefficient of `w^k`.
    pub fn coeff(&self, k: usize) -> CRat {
        match k {
            0 => self.z1.clone(),
            1 => CRat::real(self.r.clone()),
            _ => self.u.get(k - 2).cloned().unwrap_or_else(CRat::zero),
        }
    }

    /// `z(w)` as a Laurent polynomial.
    pub fn laurent(&self) -> LaurentPoly {
        Laurent::from_terms((0..=self.degree()).map(|k| (k as i64, self.coeff(k))))
    }

    /// `z̄(1/w)`, the boundary restriction of `z̄`.
    pub fn laurent_reflected(&self) -> LaurentPoly {
        self.laurent().reflect()
    }

    pub fn to_float(&self) -> FloatMap {
        FloatMap { z1: self.z1.to_c64(), r: rat_to_f64(&self.r), u: self.u.iter().map(CRat::to_c64).collect() }
    }

    /// Parses `z1=<c>;r=<rat>;u=<c>,<c>,...`. Every field is optional except `r`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut z1 = CRat::zero();
        let mut r = None;
        let mut u = Vec::new();
        for field in spec.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::InvalidMap(format!("expected key=value, got '{field}'")))?;
            match key.trim() {
                "z1" => z1 = CRat::parse(value)?,
                "r" => r = Some(parse_rat(value)?),
                "u" => {
                    u = value
                        .split(',')
                        .map(str::trim)
                        .filter(|c| !c.is_empty())
                        .map(CRat::parse)
                        .collect::<std::result::Result<_, _>>()?
                }
                other => return Err(Error::InvalidMap(format!("unknown key '{other}'"))),
            }
        }
        let r = r.ok_or_else(|| Error::InvalidMap("missing r".into()))?;
        ConformalMap::new(z1, r, u)
    }
}

impl fmt::Display for ConformalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z1={};r={}", self.z1, format_rat(&self.r))?;
        if !self.u.is_empty() {
            let parts: Vec<String> = self.u.iter().map(|c| c.to_string()).collect();
            write!(f, ";u={}", parts.join(","))?;
        }
        Ok(())
    }
}

impl FromStr for ConformalMap {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ConformalMap::parse(s)
    }
}

impl Serialize for ConformalMap {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ConformalMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ConformalMap::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl FloatMap {
    pub fn new(z1: Complex64, r: f64, u: Vec<Complex64>) -> Self {
        FloatMap { z1, r, u }
    }

    pub fn degree(&self) -> usize {
        self.u.len() + 1
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        match k {
            0 => self.z1,
            1 => Complex64::new(self.r, 0.0),
            _ => self.u.get(k - 2).copied().unwrap_or_default(),
        }
    }

    pub fn coeffs(&self) -> Vec<Complex64> {
        (0..=self.degree()).map(|k| self.coeff(k)).collect()
    }

    pub fn eval(&self, w: Complex64) -> Complex64 {
        self.coeffs().iter().rev().fold(Complex64::zero(), |acc, c| acc * w + c)
    }

    /// `z'(w)`.
    pub fn eval_derivative(&self, w: Complex64) -> Complex64 {
        let c = self.coeffs();
        (1..c.len()).rev().fold(Complex64::zero(), |acc, k| acc * w + c[k] * k as f64)
    }

    pub fn laurent(&self) -> Laurent<Complex64> {
        Laurent::from_terms(self.coeffs().into_iter().enumerate().map(|(k, c)| (k as i64, c)))
    }

    pub fn laurent_reflected(&self) -> Laurent<Complex64> {
        self.laurent().reflect()
    }

    /// Real parameter vector `(r, Re u_1, Im u_1, …)`.
    pub fn params(&self) -> Vec<f64> {
        let mut v = vec![self.r];
        for c in &self.u {
            v.push(c.re);
            v.push(c.im);
        }
        v
    }

    pub fn from_params(z1: Complex64, params: &[f64]) -> Self {
        let u = params[1..].chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        FloatMap { z1, r: params[0], u }
    }

    /// Exact map with each coefficient rounded to the nearest rational of the given denominator.
    pub fn to_exact(&self, denominator: i64) -> Result<ConformalMap> {
        let q = |x: f64| Rat::new(((x * denominator as f64).round() as i64).into(), denominator.into());
        ConformalMap::new(
            CRat::new(q(self.z1.re), q(self.z1.im)),
            q(self.r),
            self.u.iter().map(|c| CRat::new(q(c.re), q(c.im))).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let m = ConformalMap::parse("z1=1/2+1/3i;r=3/2;u=1/10,-1/5i").unwrap();
        assert_eq!(m.degree(), 3);
        assert_eq!(m.to_string(), "z1=1/2+1/3i;r=3/2;u=1/10,-1/5i");
        assert_eq!(ConformalMap::parse(&m.to_string()).unwrap(), m);
        assert_eq!(ConformalMap::parse("r=1").unwrap(), ConformalMap::disk(CRat::zero(), Rat::from_integer(1.into())).unwrap());
        assert!(ConformalMap::parse("r=0").is_err());
        assert!(ConformalMap::parse("z1=0").is_err());
        assert!(ConformalMap::parse("r=1;v=2").is_err());
    }

    #[test]
    fn float_evaluation() {
        let m = ConformalMap::parse("z1=1;r=2;u=1/2i").unwrap().to_float();
        let w = Complex64::new(0.3, -0.4);
        let direct = Complex64::new(1.0, 0.0) + 2.0 * w + Complex64::new(0.0, 0.5) * w * w;
        assert!((m.eval(w) - direct).norm() < 1e-15);
        let dz = 2.0 + Complex64::new(0.0, 1.0) * w;
        assert!((m.eval_derivative(w) - dz).norm() < 1e-15);
        let p = m.params();
        assert_eq!(FloatMap::from_params(m.z1, &p), m);
    }
}
