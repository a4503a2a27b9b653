//! Scalar types shared by the exact and floating layers.
//!
//! [`CRat`] is a Gaussian rational `re + i·im` with arbitrary-precision
//! rational parts. The [`Scalar`] trait abstracts over `CRat` and
//! `Complex64` so that Laurent arithmetic and residue evaluation can be
//! written once and run on either layer.

use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::ParseError;

/// Exact rational number.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerators or denominators: scale down before dividing.
            let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
            let shift = shift.max(0) as u32;
            let n = (r.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (r.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

/// Parses `p`, `p/q`, or a decimal literal such as `-0.125` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat, ParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseError::new("empty rational"));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| ParseError::new(format!("bad numerator in '{s}'")))?;
        let d = BigInt::from_str(d.trim()).map_err(|_| ParseError::new(format!("bad denominator in '{s}'")))?;
        if d.is_zero() {
            return Err(ParseError::new(format!("zero denominator in '{s}'")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let neg = int_part.trim_start().starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if !frac_part.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(ParseError::new(format!("bad decimal '{s}'")));
        }
        let digits = format!("{int_digits}{frac_part}");
        let digits = if digits.is_empty() { "0".to_string() } else { digits };
        let mut n = BigInt::from_str(&digits).map_err(|_| ParseError::new(format!("bad decimal '{s}'")))?;
        if neg {
            n = -n;
        }
        let d = num_traits::pow(BigInt::from(10), frac_part.len());
        return Ok(Rat::new(n, d));
    }
    BigInt::from_str(s)
        .map(Rat::from_integer)
        .map_err(|_| ParseError::new(format!("bad rational '{s}'")))
}

pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Operations needed by the generic Laurent and residue code.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn conj(&self) -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_crat(c: &CRat) -> Self;
    fn i() -> Self;
    fn to_c64(&self) -> Complex64;
}

/// Gaussian rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CRat {
    pub re: Rat,
    pub im: Rat,
}

impl CRat {
    pub fn new(re: Rat, im: Rat) -> Self {
        CRat { re, im }
    }

    pub fn real(re: Rat) -> Self {
        CRat { re, im: Rat::zero() }
    }

    pub fn int(v: i64) -> Self {
        CRat::real(rat_int(v))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        CRat::real(rat(num, den))
    }

    pub fn i() -> Self {
        CRat { re: Rat::zero(), im: Rat::one() }
    }

    pub fn zero() -> Self {
        CRat { re: Rat::zero(), im: Rat::zero() }
    }

    pub fn one() -> Self {
        CRat::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        CRat { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> Rat {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn scale(&self, k: &Rat) -> Self {
        CRat { re: &self.re * k, im: &self.im * k }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let d = self.norm_sqr();
        Some(CRat { re: &self.re / &d, im: -(&self.im / &d) })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = CRat::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => CRat::int(1),
            1 => CRat::i(),
            2 => CRat::int(-1),
            _ => -CRat::i(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Parses `a`, `a+bi`, `a-bi`, `bi`, `i`, with `a`, `b` rationals (`p/q` or decimals).
    pub fn parse(s: &str) -> Result<Self, ParseError> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ParseError::new("empty complex number"));
        }
        if !s.ends_with('i') {
            return Ok(CRat::real(parse_rat(&s)?));
        }
        let body = &s[..s.len() - 1];
        // Split at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .filter(|&(k, c)| k > 0 && (c == '+' || c == '-'))
            .map(|(k, _)| k)
            .next_back();
        let (re_part, im_part) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im_part {
            "" | "+" => Rat::one(),
            "-" => -Rat::one(),
            other => parse_rat(other.trim_start_matches('+'))?,
        };
        Ok(CRat::new(parse_rat(re_part)?, im))
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", format_rat(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}i", format_rat(&self.im))
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", format_rat(&self.re), format_rat(&-self.im.clone()))
        } else {
            write!(f, "{}+{}i", format_rat(&self.re), format_rat(&self.im))
        }
    }
}

impl fmt::Debug for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CRat {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CRat::parse(s)
    }
}

impl From<Rat> for CRat {
    fn from(r: Rat) -> Self {
        CRat::real(r)
    }
}

impl From<i64> for CRat {
    fn from(v: i64) -> Self {
        CRat::int(v)
    }
}

impl<'a> Add<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn add(self, rhs: &CRat) -> CRat {
        CRat { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn sub(self, rhs: &CRat) -> CRat {
        CRat { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn mul(self, rhs: &CRat) -> CRat {
        if self.im.is_zero() && rhs.im.is_zero() {
            return CRat::real(&self.re * &rhs.re);
        }
        CRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl<'a> Div<&'a CRat> for &'a CRat {
    type Output = CRat;
    fn div(self, rhs: &CRat) -> CRat {
        let inv = rhs.inv().expect("division of CRat by zero");
        self * &inv
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CRat> for CRat {
            type Output = CRat;
            fn $m(self, rhs: CRat) -> CRat {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CRat> for CRat {
            type Output = CRat;
            fn $m(self, rhs: &CRat) -> CRat {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<CRat> for &'a CRat {
            type Output = CRat;
            fn $m(self, rhs: CRat) -> CRat {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat { re: -self.re, im: -self.im }
    }
}

impl Neg for &CRat {
    type Output = CRat;
    fn neg(self) -> CRat {
        CRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl AddAssign<&CRat> for CRat {
    fn add_assign(&mut self, rhs: &CRat) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&CRat> for CRat {
    fn sub_assign(&mut self, rhs: &CRat) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&CRat> for CRat {
    fn mul_assign(&mut self, rhs: &CRat) {
        *self = &*self * rhs;
    }
}

impl Sum for CRat {
    fn sum<I: Iterator<Item = CRat>>(iter: I) -> CRat {
        iter.fold(CRat::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl Product for CRat {
    fn product<I: Iterator<Item = CRat>>(iter: I) -> CRat {
        iter.fold(CRat::one(), |acc, x| &acc * &x)
    }
}

impl Scalar for CRat {
    fn zero() -> Self {
        CRat::zero()
    }
    fn one() -> Self {
        CRat::one()
    }
    fn is_zero(&self) -> bool {
        CRat::is_zero(self)
    }
    fn conj(&self) -> Self {
        CRat::conj(self)
    }
    fn from_i64(v: i64) -> Self {
        CRat::int(v)
    }
    fn from_crat(c: &CRat) -> Self {
        c.clone()
    }
    fn i() -> Self {
        CRat::i()
    }
    fn to_c64(&self) -> Complex64 {
        CRat::to_c64(self)
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn from_crat(c: &CRat) -> Self {
        c.to_c64()
    }
    fn i() -> Self {
        Complex64::new(0.0, 1.0)
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_complex_literals() {
        assert_eq!(CRat::parse("3/2").unwrap(), CRat::frac(3, 2));
        assert_eq!(CRat::parse("1+2i").unwrap(), CRat::new(rat_int(1), rat_int(2)));
        assert_eq!(CRat::parse("1/3-1/5i").unwrap(), CRat::new(rat(1, 3), rat(-1, 5)));
        assert_eq!(CRat::parse("-i").unwrap(), CRat::new(rat_int(0), rat_int(-1)));
        assert_eq!(CRat::parse("i").unwrap(), CRat::i());
        assert_eq!(CRat::parse("0.25").unwrap(), CRat::frac(1, 4));
        assert_eq!(CRat::parse("-0.5+0.1i").unwrap(), CRat::new(rat(-1, 2), rat(1, 10)));
        assert!(CRat::parse("1/0").is_err());
        assert!(CRat::parse("abc").is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["0", "3/2", "-1/7i", "2-3i", "1/2+1/3i"] {
            let c = CRat::parse(s).unwrap();
            assert_eq!(CRat::parse(&c.to_string()).unwrap(), c);
        }
    }

    #[test]
    fn field_operations() {
        let a = CRat::new(rat(1, 2), rat(3, 4));
        let b = CRat::new(rat(-2, 3), rat(1, 5));
        assert_eq!(&(&a * &b) / &b, a);
        assert_eq!(a.conj().conj(), a);
        assert_eq!(CRat::i_pow(7), -CRat::i());
        assert_eq!(CRat::i().pow(4), CRat::one());
        assert!(CRat::zero().inv().is_none());
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let big = Rat::new(num_traits::pow(BigInt::from(10), 400) * 3, num_traits::pow(BigInt::from(10), 400));
        assert!((rat_to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
