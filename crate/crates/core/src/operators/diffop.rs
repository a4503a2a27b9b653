use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{BivarPoly, CRat, Mono, Rat};

/// `Σ c · z^a z̄^b ∂_z^p ∂_z̄^q`, stored as a map from derivative orders
/// `(p, q)` to polynomial coefficients.
#[derive(Clone, PartialEq, Default)]
pub struct DiffOperator {
    parts: BTreeMap<(u32, u32), BivarPoly>,
}

/// One term `c · z^a z̄^b ∂_z^p ∂_z̄^q` of a [`DiffOperator`].
#[derive(Clone, Debug, PartialEq)]
pub struct OpTerm {
    pub coeff: CRat,
    pub a: u32,
    pub b: u32,
    pub p: u32,
    pub q: u32,
}

impl DiffOperator {
    pub fn zero() -> Self {
        DiffOperator::default()
    }

    pub fn identity() -> Self {
        DiffOperator::multiplication(BivarPoly::one())
    }

    /// Multiplication by a polynomial.
    pub fn multiplication(f: BivarPoly) -> Self {
        DiffOperator::from_part(0, 0, f)
    }

    /// `f · ∂_z^p ∂_z̄^q`.
    pub fn from_part(p: u32, q: u32, f: BivarPoly) -> Self {
        let mut op = DiffOperator::zero();
        op.add_part(p, q, f);
        op
    }

    pub fn from_terms<I: IntoIterator<Item = OpTerm>>(terms: I) -> Self {
        let mut op = DiffOperator::zero();
        for t in terms {
            op.add_part(t.p, t.q, BivarPoly::monomial(t.coeff, t.a, t.b));
        }
        op
    }

    pub fn d_z() -> Self {
        DiffOperator::from_part(1, 0, BivarPoly::one())
    }

    pub fn d_zbar() -> Self {
        DiffOperator::from_part(0, 1, BivarPoly::one())
    }

    /// `2 ∂_z ∂_z̄`, the Laplacian in the normalization used throughout.
    pub fn laplacian() -> Self {
        DiffOperator::from_part(1, 1, BivarPoly::constant(CRat::int(2)))
    }

    /// Angular derivative `∂_θ = i (z ∂_z - z̄ ∂_z̄)`.
    pub fn theta_derivative() -> Self {
        let mut op = DiffOperator::from_part(1, 0, BivarPoly::monomial(CRat::i(), 1, 0));
        op.add_part(0, 1, BivarPoly::monomial(-CRat::i(), 0, 1));
        op
    }

    pub fn add_part(&mut self, p: u32, q: u32, f: BivarPoly) {
        if f.is_zero() {
            return;
        }
        let slot = self.parts.entry((p, q)).or_default();
        *slot = &*slot + &f;
        if slot.is_zero() {
            self.parts.remove(&(p, q));
        }
    }

    pub fn coefficient(&self, p: u32, q: u32) -> BivarPoly {
        self.parts.get(&(p, q)).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Highest total derivative order `p + q`.
    pub fn order(&self) -> u32 {
        self.parts.keys().map(|(p, q)| p + q).max().unwrap_or(0)
    }

    /// Terms in canonical order: by derivative `(p, q)`, then by monomial.
    pub fn terms(&self) -> Vec<OpTerm> {
        let mut out = Vec::new();
        for ((p, q), f) in &self.parts {
            for (m, c) in f.terms() {
                out.push(OpTerm { coeff: c.clone(), a: m.a, b: m.b, p: *p, q: *q });
            }
        }
        out
    }

    pub fn apply(&self, f: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for ((p, q), c) in &self.parts {
            let d = f.derivative(*p, *q);
            if !d.is_zero() {
                out = &out + &(c * &d);
            }
        }
        out
    }

    pub fn add(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = self.clone();
        for ((p, q), f) in &other.parts {
            out.add_part(*p, *q, f.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOperator) -> DiffOperator {
        self.add(&other.scale(&CRat::int(-1)))
    }

    pub fn scale(&self, c: &CRat) -> DiffOperator {
        let mut out = DiffOperator::zero();
        for ((p, q), f) in &self.parts {
            out.add_part(*p, *q, f.scale(c));
        }
        out
    }

    /// Left multiplication `f · self`.
    pub fn premultiply(&self, f: &BivarPoly) -> DiffOperator {
        let mut out = DiffOperator::zero();
        for ((p, q), g) in &self.parts {
            out.add_part(*p, *q, f * g);
        }
        out
    }

    /// `self ∘ other`, expanded with the Leibniz rule.
    pub fn compose(&self, other: &DiffOperator) -> DiffOperator {
        let mut out = DiffOperator::zero();
        for ((p, q), a) in &self.parts {
            for ((r, s), b) in &other.parts {
                for i in 0..=*p {
                    for j in 0..=*q {
                        let db = b.derivative(i, j);
                        if db.is_zero() {
                            continue;
                        }
                        let c = binomial(*p, i) * binomial(*q, j);
                        let coeff = (a * &db).scale(&CRat::real(Rat::from_integer(c)));
                        out.add_part(p - i + r, q - j + s, coeff);
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> DiffOperator {
        let mut acc = DiffOperator::identity();
        for _ in 0..e {
            acc = acc.compose(self);
        }
        acc
    }

    /// Swaps the roles of `z` and `z̄` and conjugates coefficients, so that
    /// `conj(T[f]) = T.conj()[conj(f)]`.
    pub fn conj(&self) -> DiffOperator {
        let mut out = DiffOperator::zero();
        for ((p, q), f) in &self.parts {
            out.add_part(*q, *p, f.conj());
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut c = BigInt::from(1);
    for j in 0..k {
        c = c * (n - j) / (j + 1);
    }
    c
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((p, q), c) in &self.parts {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{c}]")?;
            match (p, q) {
                (0, 0) => {}
                _ => write!(f, "·∂z^{p}·∂zb^{q}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct OpTermRecord {
    a: u32,
    b: u32,
    p: u32,
    q: u32,
    re_num: String,
    re_den: String,
    im_num: String,
    im_den: String,
}

impl Serialize for DiffOperator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let records: Vec<OpTermRecord> = self
            .terms()
            .into_iter()
            .map(|t| OpTermRecord {
                a: t.a,
                b: t.b,
                p: t.p,
                q: t.q,
                re_num: t.coeff.re.numer().to_string(),
                re_den: t.coeff.re.denom().to_string(),
                im_num: t.coeff.im.numer().to_string(),
                im_den: t.coeff.im.denom().to_string(),
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DiffOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let records = Vec::<OpTermRecord>::deserialize(d)?;
        let big = |s: &str| s.parse::<BigInt>().map_err(D::Error::custom);
        let mut op = DiffOperator::zero();
        for r in records {
            let re_den = big(&r.re_den)?;
            let im_den = big(&r.im_den)?;
            if re_den == BigInt::from(0) || im_den == BigInt::from(0) {
                return Err(D::Error::custom("zero denominator"));
            }
            let c = CRat::new(BigRational::new(big(&r.re_num)?, re_den), BigRational::new(big(&r.im_num)?, im_den));
            let mut f = BivarPoly::zero();
            f.add_term(Mono::new(r.a, r.b), c);
            op.add_part(r.p, r.q, f);
        }
        Ok(op)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BivarPoly {
        BivarPoly::parse(s).unwrap()
    }

    #[test]
    fn apply_and_order() {
        let lap = DiffOperator::laplacian();
        assert_eq!(lap.order(), 2);
        assert_eq!(lap.apply(&p("z^2*zb^3")), p("12*z*zb^2"));
        assert!(lap.apply(&p("z^5 + zb^2")).is_zero());
    }

    #[test]
    fn composition_matches_sequential_application() {
        let a = DiffOperator::from_part(1, 0, p("z*zb + 2")).add(&DiffOperator::multiplication(p("zb")));
        let b = DiffOperator::from_part(1, 1, p("z^2")).add(&DiffOperator::from_part(0, 1, p("i*z")));
        let ab = a.compose(&b);
        for f in ["z^4*zb^3", "z^2 + 3*zb^5", "z^3*zb - 1/2*z*zb^4"] {
            assert_eq!(ab.apply(&p(f)), a.apply(&b.apply(&p(f))));
        }
        let c = DiffOperator::theta_derivative();
        assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn theta_derivative_acts_on_angle() {
        let th = DiffOperator::theta_derivative();
        assert_eq!(th.apply(&p("z^3")), p("3*i*z^3"));
        assert_eq!(th.apply(&p("z*zb")), BivarPoly::zero());
    }

    #[test]
    fn conjugate_operator() {
        let t = DiffOperator::from_part(1, 0, p("(1+i)*z*zb^2")).add(&DiffOperator::multiplication(p("3*zb")));
        let f = p("z^3*zb + 2*i*z");
        assert_eq!(t.apply(&f).conj(), t.conj().apply(&f.conj()));
    }

    #[test]
    fn json_round_trip() {
        let t = DiffOperator::from_part(2, 1, p("1/3*z*zb - i")).add(&DiffOperator::laplacian());
        let s = serde_json::to_string(&t).unwrap();
        let back: DiffOperator = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }
}
