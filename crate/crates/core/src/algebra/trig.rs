//! Graded trigonometric Laurent expressions `ρ^a Σ c_k e^{i k m θ}`.
//!
//! The angular unit `m` is part of the value: arithmetic between
//! expressions with different units is refused, and the caller must
//! [`TrigLaurent::refine`] explicitly to a common unit first.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::bivar::{BivarPoly, Mono};
use super::scalar::{CRat, Rat};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TrigLaurent {
    rho_power: i64,
    unit: u32,
    terms: BTreeMap<i64, CRat>,
}

impl TrigLaurent {
    pub fn zero(unit: u32) -> Self {
        assert!(unit >= 1, "angular unit must be positive");
        TrigLaurent { rho_power: 0, unit, terms: BTreeMap::new() }
    }

    /// `c · e^{i k m θ}`.
    pub fn exp(unit: u32, k: i64, c: CRat) -> Self {
        let mut t = TrigLaurent::zero(unit);
        t.add_term(k, c);
        t
    }

    pub fn constant(unit: u32, c: CRat) -> Self {
        TrigLaurent::exp(unit, 0, c)
    }

    /// `cos(k m θ)`.
    pub fn cos(unit: u32, k: i64) -> Self {
        let half = CRat::frac(1, 2);
        let mut t = TrigLaurent::exp(unit, k, half.clone());
        t.add_term(-k, half);
        t
    }

    /// `sin(k m θ)`.
    pub fn sin(unit: u32, k: i64) -> Self {
        // (e^{ikx} - e^{-ikx}) / 2i
        let c = CRat::new(Rat::from_integer(0.into()), Rat::new((-1).into(), 2.into()));
        let mut t = TrigLaurent::exp(unit, k, c.clone());
        t.add_term(-k, -c);
        t
    }

    /// `sin(k (m θ + π/2))`.
    pub fn sin_quarter_shifted(unit: u32, k: i64) -> Self {
        // e^{ik(x+π/2)} = i^k e^{ikx}
        let c = CRat::new(Rat::from_integer(0.into()), Rat::new((-1).into(), 2.into()));
        let mut t = TrigLaurent::exp(unit, k, &CRat::i_pow(k) * &c);
        t.add_term(-k, -(&CRat::i_pow(-k) * &c));
        t
    }

    pub fn unit(&self) -> u32 {
        self.unit
    }

    pub fn rho_power(&self) -> i64 {
        self.rho_power
    }

    pub fn with_rho_power(mut self, a: i64) -> Self {
        self.rho_power = a;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &CRat)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, k: i64, c: CRat) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k).or_insert_with(CRat::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    /// Re-expresses in a finer angular unit `new_unit`, which must divide the current one.
    pub fn refine(&self, new_unit: u32) -> Result<Self> {
        if new_unit == 0 || !self.unit.is_multiple_of(new_unit) {
            return Err(Error::Invalid(format!(
                "cannot refine angular unit {} to {}",
                self.unit, new_unit
            )));
        }
        let ratio = (self.unit / new_unit) as i64;
        Ok(TrigLaurent {
            rho_power: self.rho_power,
            unit: new_unit,
            terms: self.terms.iter().map(|(k, c)| (k * ratio, c.clone())).collect(),
        })
    }

    fn check_unit(&self, other: &Self) -> Result<()> {
        if self.unit != other.unit {
            return Err(Error::Invalid(format!(
                "mixed angular units {} and {}; refine to a common unit first",
                self.unit, other.unit
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_unit(other)?;
        if self.rho_power != other.rho_power && !self.is_zero() && !other.is_zero() {
            return Err(Error::Invalid("adding expressions of different radial grade".into()));
        }
        let mut out = self.clone();
        if out.is_zero() {
            out.rho_power = other.rho_power;
        }
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&CRat::int(-1)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_unit(other)?;
        let mut out = TrigLaurent::zero(self.unit);
        out.rho_power = self.rho_power + other.rho_power;
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.add_term(k1 + k2, c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = TrigLaurent::constant(self.unit, CRat::one());
        for _ in 0..e {
            acc = acc.mul(self).expect("same unit");
        }
        acc
    }

    pub fn scale(&self, c: &CRat) -> Self {
        let mut out = TrigLaurent::zero(self.unit);
        out.rho_power = self.rho_power;
        for (k, v) in &self.terms {
            out.add_term(*k, v * c);
        }
        out
    }

    /// `∂/∂θ`; leaves the radial grade unchanged.
    pub fn d_theta(&self) -> Self {
        let mut out = TrigLaurent::zero(self.unit);
        out.rho_power = self.rho_power;
        for (k, c) in &self.terms {
            let factor = CRat::new(Rat::from_integer(0.into()), Rat::from_integer((k * self.unit as i64).into()));
            out.add_term(*k, c * &factor);
        }
        out
    }

    /// Exact quotient in the Laurent ring; errors if a remainder is left.
    /// The radial grade of the result is the difference of grades.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self> {
        self.check_unit(divisor)?;
        let (dmin, dmax) = match (divisor.terms.keys().next(), divisor.terms.keys().next_back()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => return Err(Error::InexactDivision("division by zero expression".into())),
        };
        let mut out = TrigLaurent::zero(self.unit);
        out.rho_power = self.rho_power - divisor.rho_power;
        if self.is_zero() {
            return Ok(out);
        }
        let lead = divisor.terms[&dmax].inv().expect("nonzero leading coefficient");
        let mut rem = self.terms.clone();
        // Long division from the top degree down, in the variable e^{imθ}.
        while let Some((&top, _)) = rem.iter().next_back() {
            let rmin = *rem.keys().next().unwrap();
            if top - dmax < rmin - dmin {
                break;
            }
            let q = &rem[&top] * &lead;
            let shift = top - dmax;
            out.add_term(shift, q.clone());
            for (k, c) in &divisor.terms {
                let slot = rem.entry(k + shift).or_insert_with(CRat::zero);
                *slot -= &(c * &q);
                if slot.is_zero() {
                    rem.remove(&(k + shift));
                }
            }
        }
        if !rem.is_empty() {
            return Err(Error::InexactDivision(format!(
                "{} remainder term(s) after dividing trigonometric expressions",
                rem.len()
            )));
        }
        Ok(out)
    }

    /// True when every term satisfies `ρ^a e^{ikmθ} = z^p z̄^q` with nonnegative integer `p, q`.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|k| {
            let f = k * self.unit as i64;
            self.rho_power >= f.abs() && (self.rho_power - f).rem_euclid(2) == 0
        })
    }

    /// Converts via `ρ^a e^{ifθ} = z^{(a+f)/2} z̄^{(a-f)/2}`.
    pub fn to_bivar(&self) -> Result<BivarPoly> {
        if !self.is_polynomial() {
            return Err(Error::Invalid(format!(
                "trigonometric expression with radial grade {} is not a polynomial in (z, zbar)",
                self.rho_power
            )));
        }
        let mut out = BivarPoly::zero();
        for (k, c) in &self.terms {
            let f = k * self.unit as i64;
            let a = ((self.rho_power + f) / 2) as u32;
            let b = ((self.rho_power - f) / 2) as u32;
            out.add_term(Mono::new(a, b), c.clone());
        }
        Ok(out)
    }

    /// Inverse of [`TrigLaurent::to_bivar`] for polynomials homogeneous of degree `d`.
    pub fn from_homogeneous(p: &BivarPoly, d: u32, unit: u32) -> Result<Self> {
        let mut out = TrigLaurent::zero(unit);
        out.rho_power = d as i64;
        for (m, c) in p.terms() {
            if m.degree() != d {
                return Err(Error::Invalid(format!("polynomial is not homogeneous of degree {d}")));
            }
            let f = m.a as i64 - m.b as i64;
            if f % unit as i64 != 0 {
                return Err(Error::Invalid(format!("frequency {f} is not a multiple of unit {unit}")));
            }
            out.add_term(f / unit as i64, c.clone());
        }
        Ok(out)
    }

    pub fn eval(&self, rho: f64, theta: f64) -> Complex64 {
        let radial = rho.powi(self.rho_power as i32);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let phase = (*k as f64) * (self.unit as f64) * theta;
            acc += c.to_c64() * Complex64::from_polar(1.0, phase);
        }
        acc * radial
    }
}

/// Determinant by cofactor expansion along the first row. Entries must share a unit.
pub fn determinant(m: &[Vec<TrigLaurent>]) -> Result<TrigLaurent> {
    let n = m.len();
    if n == 0 {
        return Err(Error::Invalid("empty matrix".into()));
    }
    let unit = m[0][0].unit();
    if n == 1 {
        return Ok(m[0][0].clone());
    }
    let mut acc = TrigLaurent::zero(unit);
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<TrigLaurent>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect())
            .collect();
        let sub = determinant(&minor)?;
        let term = m[0][j].mul(&sub)?;
        acc = if j % 2 == 0 { acc.add(&term)? } else { acc.sub(&term)? };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagoras_and_division() {
        let c = TrigLaurent::cos(2, 1);
        let s = TrigLaurent::sin(2, 1);
        let one = c.mul(&c).unwrap().add(&s.mul(&s).unwrap()).unwrap();
        assert_eq!(one, TrigLaurent::constant(2, CRat::one()));
        // sin(2x) / sin(x) = 2 cos(x)
        let s2 = TrigLaurent::sin(2, 2);
        assert_eq!(s2.div_exact(&s).unwrap(), c.scale(&CRat::int(2)));
        assert!(TrigLaurent::cos(2, 2).div_exact(&c).is_err());
    }

    #[test]
    fn units_do_not_mix_silently() {
        let a = TrigLaurent::cos(2, 1);
        let b = TrigLaurent::cos(1, 1);
        assert!(a.mul(&b).is_err());
        let a1 = a.refine(1).unwrap();
        assert_eq!(a1, TrigLaurent::cos(1, 2));
        assert!(b.refine(2).is_err());
    }

    #[test]
    fn quarter_shift_seeds() {
        // sin(x + π/2) = cos x, sin(2(x + π/2)) = -sin 2x
        assert_eq!(TrigLaurent::sin_quarter_shifted(1, 1), TrigLaurent::cos(1, 1));
        assert_eq!(TrigLaurent::sin_quarter_shifted(3, 2), TrigLaurent::sin(3, 2).scale(&CRat::int(-1)));
    }

    #[test]
    fn polynomial_conversion() {
        // ρ² cos 2θ = (z² + z̄²)/2
        let t = TrigLaurent::cos(2, 1).with_rho_power(2);
        assert_eq!(t.to_bivar().unwrap(), BivarPoly::parse("1/2*z^2 + 1/2*zb^2").unwrap());
        assert!(TrigLaurent::cos(1, 1).with_rho_power(2).to_bivar().is_err());
        let back = TrigLaurent::from_homogeneous(&t.to_bivar().unwrap(), 2, 2).unwrap();
        assert_eq!(back, t);
    }
}
