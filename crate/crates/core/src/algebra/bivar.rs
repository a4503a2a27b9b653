//! Exact polynomials in `(z, z̄)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scalar::{parse_rat, CRat, Rat, Scalar};
use crate::error::ParseError;

/// Exponent pair `z^a z̄^b`, ordered graded-lexicographically: by total
/// degree, then by the `z` exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Mono {
    pub a: u32,
    pub b: u32,
}

impl Mono {
    pub fn new(a: u32, b: u32) -> Self {
        Mono { a, b }
    }

    pub fn degree(&self) -> u32 {
        self.a + self.b
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.a.cmp(&self.a))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Finite sum `Σ c_{ab} z^a z̄^b` with Gaussian-rational coefficients. No
/// zero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct BivarPoly {
    terms: BTreeMap<Mono, CRat>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly { terms: BTreeMap::new() }
    }

    pub fn constant(c: CRat) -> Self {
        BivarPoly::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        BivarPoly::constant(CRat::one())
    }

    pub fn monomial(c: CRat, a: u32, b: u32) -> Self {
        let mut p = BivarPoly::zero();
        p.add_term(Mono::new(a, b), c);
        p
    }

    pub fn z() -> Self {
        BivarPoly::monomial(CRat::one(), 1, 0)
    }

    pub fn zbar() -> Self {
        BivarPoly::monomial(CRat::one(), 0, 1)
    }

    /// `(z - z1)^k`.
    pub fn shifted_z_power(z1: &CRat, k: u32) -> Self {
        (&BivarPoly::z() - &BivarPoly::constant(z1.clone())).pow(k)
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, u32, CRat)>>(terms: I) -> Self {
        let mut p = BivarPoly::zero();
        for (a, b, c) in terms {
            p.add_term(Mono::new(a, b), c);
        }
        p
    }

    pub fn add_term(&mut self, m: Mono, c: CRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += &c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &CRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: u32, b: u32) -> CRat {
        self.terms.get(&Mono::new(a, b)).cloned().unwrap_or_else(CRat::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(Mono::degree).max()
    }

    pub fn max_z_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.a).max().unwrap_or(0)
    }

    pub fn max_zbar_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.b).max().unwrap_or(0)
    }

    /// True when every term has total degree `d`.
    pub fn is_homogeneous(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// Swaps the roles of `z` and `z̄` and conjugates coefficients.
    pub fn conj(&self) -> Self {
        BivarPoly {
            terms: self.terms.iter().map(|(m, c)| (Mono::new(m.b, m.a), c.conj())).collect(),
        }
    }

    pub fn scale(&self, k: &CRat) -> Self {
        if k.is_zero() {
            return BivarPoly::zero();
        }
        BivarPoly { terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = BivarPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `∂^p/∂z^p ∂^q/∂z̄^q`.
    pub fn derivative(&self, p: u32, q: u32) -> Self {
        let mut out = BivarPoly::zero();
        for (m, c) in &self.terms {
            if m.a < p || m.b < q {
                continue;
            }
            let k = falling(m.a, p) * falling(m.b, q);
            out.add_term(Mono::new(m.a - p, m.b - q), c.scale(&Rat::from_integer(k.into())));
        }
        out
    }

    /// Primitive in `z̄` with zero integration constant: `z^a z̄^b ↦ z^a z̄^(b+1)/(b+1)`.
    pub fn antiderivative_zbar(&self) -> Self {
        BivarPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Mono::new(m.a, m.b + 1), c.scale(&Rat::new(1.into(), (m.b as i64 + 1).into()))))
                .collect(),
        }
    }

    pub fn d_z(&self) -> Self {
        self.derivative(1, 0)
    }

    pub fn d_zbar(&self) -> Self {
        self.derivative(0, 1)
    }

    /// Multiplies by `z^a z̄^b`.
    pub fn shift(&self, a: u32, b: u32) -> Self {
        BivarPoly {
            terms: self.terms.iter().map(|(m, c)| (Mono::new(m.a + a, m.b + b), c.clone())).collect(),
        }
    }

    /// Evaluates with `z̄` treated as an independent variable.
    pub fn eval<S: Scalar>(&self, z: &S, zbar: &S) -> S {
        let amax = self.max_z_degree() as usize;
        let bmax = self.max_zbar_degree() as usize;
        let zp = powers(z, amax);
        let zbp = powers(zbar, bmax);
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let t = S::from_crat(c) * &zp[m.a as usize] * &zbp[m.b as usize];
            acc = acc + t;
        }
        acc
    }

    /// Value at the point `z`, i.e. with `z̄ = conj(z)`.
    pub fn eval_at(&self, z: &CRat) -> CRat {
        self.eval(z, &z.conj())
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        self.eval(&z, &z.conj())
    }

    /// Rewrites the polynomial in the variables `ζ = z − z1`, `ζ̄ = z̄ − z̄1`.
    /// The result evaluated at `(ζ, ζ̄)` equals the original at `(z, z̄)`.
    pub fn recentered(&self, z1: &CRat) -> Self {
        let z1b = z1.conj();
        let amax = self.max_z_degree();
        let bmax = self.max_zbar_degree();
        // (ζ + z1)^a expanded in ζ, cached per a.
        let za: Vec<Vec<CRat>> = (0..=amax).map(|a| binomial_shift(a, z1)).collect();
        let zb: Vec<Vec<CRat>> = (0..=bmax).map(|b| binomial_shift(b, &z1b)).collect();
        let mut out = BivarPoly::zero();
        for (m, c) in &self.terms {
            for (i, ci) in za[m.a as usize].iter().enumerate() {
                if ci.is_zero() {
                    continue;
                }
                let cci = c * ci;
                for (j, cj) in zb[m.b as usize].iter().enumerate() {
                    if cj.is_zero() {
                        continue;
                    }
                    out.add_term(Mono::new(i as u32, j as u32), &cci * cj);
                }
            }
        }
        out
    }

    /// Maps coefficients into another scalar type, returned as `(a, b, c)` triples.
    pub fn to_scalar_terms<S: Scalar>(&self) -> Vec<(u32, u32, S)> {
        self.terms.iter().map(|(m, c)| (m.a, m.b, S::from_crat(c))).collect()
    }

    /// Parses expressions such as `z + zb`, `3/2*z^2*zb - i*z`, `(1+2i)*zb^3 + 1/2`.
    pub fn parse(s: &str) -> Result<Self, ParseError> {
        parse_poly(s)
    }
}

fn falling(n: u32, k: u32) -> i64 {
    (0..k).map(|j| (n - j) as i64).product()
}

fn powers<S: Scalar>(x: &S, n: usize) -> Vec<S> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(S::one());
    for k in 1..=n {
        let next = out[k - 1].clone() * x;
        out.push(next);
    }
    out
}

/// Coefficients of `(ζ + c)^n` in ascending powers of `ζ`.
fn binomial_shift(n: u32, c: &CRat) -> Vec<CRat> {
    let cp = {
        let mut v = vec![CRat::one()];
        for k in 1..=n as usize {
            let next = &v[k - 1] * c;
            v.push(next);
        }
        v
    };
    let mut binom = num_bigint::BigInt::from(1);
    let mut out = Vec::with_capacity(n as usize + 1);
    for i in 0..=n {
        out.push(cp[(n - i) as usize].scale(&Rat::from_integer(binom.clone())));
        binom = binom * (n - i) / (i + 1);
    }
    out
}

impl<'a> Add<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c);
        }
        out
    }
}

impl<'a> Mul<&'a BivarPoly> for &'a BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(Mono::new(m1.a + m2.a, m1.b + m2.b), c1 * c2);
            }
        }
        out
    }
}

impl Add for BivarPoly {
    type Output = BivarPoly;
    fn add(self, rhs: BivarPoly) -> BivarPoly {
        &self + &rhs
    }
}

impl Sub for BivarPoly {
    type Output = BivarPoly;
    fn sub(self, rhs: BivarPoly) -> BivarPoly {
        &self - &rhs
    }
}

impl Mul for BivarPoly {
    type Output = BivarPoly;
    fn mul(self, rhs: BivarPoly) -> BivarPoly {
        &self * &rhs
    }
}

impl Neg for &BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        BivarPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl Neg for BivarPoly {
    type Output = BivarPoly;
    fn neg(self) -> BivarPoly {
        -&self
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            match m.a {
                0 => {}
                1 => write!(f, "*z")?,
                a => write!(f, "*z^{a}")?,
            }
            match m.b {
                0 => {}
                1 => write!(f, "*zb")?,
                b => write!(f, "*zb^{b}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One serialized term: `c · z^a z̄^b` with `c = re_num/re_den + i·im_num/im_den`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub a: u32,
    pub b: u32,
    pub re_num: String,
    pub re_den: String,
    pub im_num: String,
    pub im_den: String,
}

impl Serialize for BivarPoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .map(|(m, c)| TermRecord {
                a: m.a,
                b: m.b,
                re_num: c.re.numer().to_string(),
                re_den: c.re.denom().to_string(),
                im_num: c.im.numer().to_string(),
                im_den: c.im.denom().to_string(),
            })
            .collect();
        records.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BivarPoly {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let records = Vec::<TermRecord>::deserialize(deserializer)?;
        let mut p = BivarPoly::zero();
        for r in records {
            let re = parse_rat(&format!("{}/{}", r.re_num, r.re_den)).map_err(D::Error::custom)?;
            let im = parse_rat(&format!("{}/{}", r.im_num, r.im_den)).map_err(D::Error::custom)?;
            p.add_term(Mono::new(r.a, r.b), CRat::new(re, im));
        }
        Ok(p)
    }
}

// ---- parsing ----

fn parse_poly(src: &str) -> Result<BivarPoly, ParseError> {
    let s: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(ParseError::new("empty polynomial"));
    }
    let mut out = BivarPoly::zero();
    for (sign, term) in split_terms(&s)? {
        let mut acc = BivarPoly::constant(CRat::int(sign));
        for factor in split_factors(term) {
            let factor = factor.trim_start_matches('+');
            if factor.is_empty() {
                return Err(ParseError::new(format!("empty factor in '{src}'")));
            }
            acc = &acc * &parse_factor(factor)?;
        }
        out = &out + &acc;
    }
    Ok(out)
}

fn parse_exponent(e: &str, factor: &str) -> Result<u32, ParseError> {
    e.parse::<u32>().map_err(|_| ParseError::new(format!("bad exponent in '{factor}'")))
}

fn parse_factor(factor: &str) -> Result<BivarPoly, ParseError> {
    if factor.starts_with('(') {
        let close = factor.rfind(')').ok_or_else(|| ParseError::new(format!("unbalanced parentheses in '{factor}'")))?;
        let inner = &factor[1..close];
        let exp = match &factor[close + 1..] {
            "" => 1,
            rest => match rest.strip_prefix('^') {
                Some(e) => parse_exponent(e, factor)?,
                None => return Err(ParseError::new(format!("unexpected '{rest}' after group"))),
            },
        };
        let base = match CRat::parse(inner) {
            Ok(c) => BivarPoly::constant(c),
            Err(_) => parse_poly(inner)?,
        };
        return Ok(base.pow(exp));
    }
    let (base, exp) = match factor.split_once('^') {
        Some((base, e)) => (base, parse_exponent(e, factor)?),
        None => (factor, 1),
    };
    Ok(match base {
        "z" => BivarPoly::monomial(CRat::one(), exp, 0),
        "zb" | "zbar" => BivarPoly::monomial(CRat::one(), 0, exp),
        "i" => BivarPoly::constant(CRat::i().pow(exp)),
        num => BivarPoly::constant(CRat::real(parse_rat(num)?).pow(exp)),
    })
}

/// Splits at top-level `+`/`-` (outside parentheses), keeping the sign.
fn split_terms(s: &str) -> Result<Vec<(i64, &str)>, ParseError> {
    let bytes = s.as_bytes();
    let mut depth = 0i32;
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut sign = 1i64;
    for (k, &ch) in bytes.iter().enumerate() {
        match ch {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'+' | b'-' if depth == 0 => {
                // A sign directly after '/' or '*' or '^' belongs to a factor.
                let prev = if k == 0 { None } else { Some(bytes[k - 1]) };
                if matches!(prev, Some(b'*') | Some(b'/') | Some(b'^')) {
                    continue;
                }
                if k > start {
                    out.push((sign, &s[start..k]));
                }
                sign = if ch == b'-' { -1 } else { 1 };
                start = k + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(ParseError::new(format!("unbalanced parentheses in '{s}'")));
        }
    }
    if depth != 0 {
        return Err(ParseError::new(format!("unbalanced parentheses in '{s}'")));
    }
    if start >= s.len() {
        return Err(ParseError::new(format!("dangling sign in '{s}'")));
    }
    out.push((sign, &s[start..]));
    Ok(out)
}

fn split_factors(term: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0usize;
    for (k, ch) in term.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                out.push(&term[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push(&term[start..]);
    out
}
