use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{format_rat, parse_rat, rat_to_f64, BivarPoly, CRat, Rat};
use crate::error::{Error, ParseError, Result};

/// Coefficient families `(κ, η)` of the variable-coefficient problem.
#[derive(Clone, Debug, PartialEq)]
pub enum CoefficientProfile {
    /// `κ = η = 1`.
    Constant,
    /// `κη = h²` with `h` real and harmonic; the operator is `h⁻¹ Δ h`.
    GaugeTrivial { h: BivarPoly, eta: BivarPoly },
    /// `κ = (X + x1)^(-2n)`, `η = 1`.
    PowerX { n: u32, x1: Rat },
    /// `κ = (z^m + z̄^m)^(-2n) (z^m - z̄^m)^(-2l)`, `η = 1`, `n > l`.
    Dihedral { n: u32, l: u32, m: u32 },
}

impl CoefficientProfile {
    pub fn power_x(n: u32, x1: Rat) -> Result<Self> {
        let p = CoefficientProfile::PowerX { n, x1 };
        p.validate()?;
        Ok(p)
    }

    pub fn dihedral(n: u32, l: u32, m: u32) -> Result<Self> {
        let p = CoefficientProfile::Dihedral { n, l, m };
        p.validate()?;
        Ok(p)
    }

    pub fn gauge_trivial(h: BivarPoly, eta: BivarPoly) -> Result<Self> {
        let p = CoefficientProfile::GaugeTrivial { h, eta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientProfile::Constant => Ok(()),
            CoefficientProfile::GaugeTrivial { h, eta } => {
                if h.is_zero() {
                    return Err(Error::InvalidProfile("h must be nonzero".into()));
                }
                if h.terms().any(|(m, _)| m.a > 0 && m.b > 0) {
                    return Err(Error::InvalidProfile(format!(
                        "h = {h} has mixed z·z̄ terms and is not harmonic"
                    )));
                }
                if &h.conj() != h {
                    return Err(Error::InvalidProfile(format!("h = {h} is not real-valued")));
                }
                if &eta.conj() != eta || eta.is_zero() {
                    return Err(Error::InvalidProfile(format!("eta = {eta} must be real-valued and nonzero")));
                }
                Ok(())
            }
            CoefficientProfile::PowerX { n, x1 } => {
                if *n == 0 {
                    return Err(Error::InvalidProfile("power-x requires n >= 1".into()));
                }
                if x1.is_negative() {
                    return Err(Error::InvalidProfile("power-x requires x1 >= 0".into()));
                }
                Ok(())
            }
            CoefficientProfile::Dihedral { n, l, m } => {
                if *m == 0 {
                    return Err(Error::InvalidProfile("dihedral requires m >= 1".into()));
                }
                if n <= l {
                    return Err(Error::InvalidProfile(format!("dihedral requires n > l >= 0, got n = {n}, l = {l}")));
                }
                Ok(())
            }
        }
    }

    /// Moment weight `η`.
    pub fn eta(&self) -> BivarPoly {
        match self {
            CoefficientProfile::GaugeTrivial { eta, .. } => eta.clone(),
            _ => BivarPoly::one(),
        }
    }

    /// `κη` at a point, for the finite-difference residual.
    pub fn kappa_eta(&self, z: Complex64) -> f64 {
        match self {
            CoefficientProfile::Constant => 1.0,
            CoefficientProfile::GaugeTrivial { h, .. } => {
                let v = h.eval_c64(z).re;
                v * v
            }
            CoefficientProfile::PowerX { n, x1 } => (z.re + rat_to_f64(x1)).powi(-2 * *n as i32),
            CoefficientProfile::Dihedral { n, l, m } => {
                let zm = z.powu(*m);
                let a = 2.0 * zm.re;
                let b = 2.0 * zm.im;
                a.powi(-2 * *n as i32) * b.powi(-2 * *l as i32)
            }
        }
    }

    /// True if `z` lies on a line where `κη` vanishes or blows up.
    pub fn on_singular_set(&self, z: &CRat) -> bool {
        match self {
            CoefficientProfile::Constant => false,
            CoefficientProfile::GaugeTrivial { h, .. } => h.eval_at(z).is_zero(),
            CoefficientProfile::PowerX { x1, .. } => (&z.re + x1).is_zero(),
            CoefficientProfile::Dihedral { m, .. } => {
                let zm = z.pow(*m);
                zm.re.is_zero() || zm.im.is_zero()
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), a.trim()),
            None => (s, ""),
        };
        let mut fields: Vec<(&str, &str)> = Vec::new();
        if !args.is_empty() {
            for part in args.split(',') {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| ParseError::new(format!("expected key=value in profile, got '{part}'")))?;
                fields.push((k.trim(), v.trim()));
            }
        }
        let take = |key: &str| fields.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let allow = |keys: &[&str]| -> Result<()> {
            for (k, _) in &fields {
                if !keys.contains(k) {
                    return Err(Error::InvalidProfile(format!("unknown key '{k}' for profile '{kind}'")));
                }
            }
            Ok(())
        };
        let int = |key: &str| -> Result<u32> {
            let v = take(key).ok_or_else(|| Error::InvalidProfile(format!("missing '{key}' in '{s}'")))?;
            v.parse::<u32>()
                .map_err(|_| Error::InvalidProfile(format!("'{key}' must be a non-negative integer, got '{v}'")))
        };
        let profile = match kind {
            "constant" => {
                allow(&[])?;
                CoefficientProfile::Constant
            }
            "gauge-trivial" => {
                allow(&["h", "eta"])?;
                let h = take("h").ok_or_else(|| Error::InvalidProfile("gauge-trivial needs h=<poly>".into()))?;
                let eta = match take("eta") {
                    Some(e) => BivarPoly::parse(e)?,
                    None => BivarPoly::one(),
                };
                CoefficientProfile::GaugeTrivial { h: BivarPoly::parse(h)?, eta }
            }
            "power-x" => {
                allow(&["n", "x1"])?;
                let x1 = match take("x1") {
                    Some(v) => parse_rat(v)?,
                    None => Rat::zero(),
                };
                CoefficientProfile::PowerX { n: int("n")?, x1 }
            }
            "dihedral" => {
                allow(&["n", "l", "m"])?;
                CoefficientProfile::Dihedral { n: int("n")?, l: int("l")?, m: int("m")? }
            }
            other => return Err(Error::InvalidProfile(format!("unknown profile kind '{other}'"))),
        };
        profile.validate()?;
        Ok(profile)
    }
}

impl fmt::Display for CoefficientProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientProfile::Constant => write!(f, "constant"),
            CoefficientProfile::GaugeTrivial { h, eta } => {
                write!(f, "gauge-trivial:h={h}")?;
                if eta != &BivarPoly::one() {
                    write!(f, ",eta={eta}")?;
                }
                Ok(())
            }
            CoefficientProfile::PowerX { n, x1 } => write!(f, "power-x:n={n},x1={}", format_rat(x1)),
            CoefficientProfile::Dihedral { n, l, m } => write!(f, "dihedral:n={n},l={l},m={m}"),
        }
    }
}

impl FromStr for CoefficientProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CoefficientProfile::parse(s)
    }
}

impl Serialize for CoefficientProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CoefficientProfile {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CoefficientProfile::parse(&s).map_err(serde::de::Error::custom)
    }
}
