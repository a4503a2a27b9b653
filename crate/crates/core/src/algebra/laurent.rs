//! Finite Laurent series in the map variable `w`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::bivar::BivarPoly;
use super::scalar::{CRat, Scalar};

/// `Σ c_k w^k` over a finite set of integer powers. Zero terms are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct Laurent<S: Scalar> {
    terms: BTreeMap<i64, S>,
}

/// Exact Laurent polynomial.
pub type LaurentPoly = Laurent<CRat>;

impl<S: Scalar> Default for Laurent<S> {
    fn default() -> Self {
        Laurent::zero()
    }
}

impl<S: Scalar> Laurent<S> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    pub fn constant(c: S) -> Self {
        Laurent::monomial(c, 0)
    }

    pub fn one() -> Self {
        Laurent::constant(S::one())
    }

    pub fn monomial(c: S, k: i64) -> Self {
        let mut l = Laurent::zero();
        l.add_term(k, c);
        l
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, S)>>(terms: I) -> Self {
        let mut l = Laurent::zero();
        for (k, c) in terms {
            l.add_term(k, c);
        }
        l
    }

    pub fn add_term(&mut self, k: i64, c: S) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(k).or_insert_with(S::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn coeff(&self, k: i64) -> S {
        self.terms.get(&k).cloned().unwrap_or_else(S::zero)
    }

    /// Coefficient of `w^-1`.
    pub fn residue(&self) -> S {
        self.coeff(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &S)> {
        self.terms.iter()
    }

    pub fn min_power(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_power(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn scale(&self, k: &S) -> Self {
        Laurent::from_terms(self.terms.iter().map(|(p, c)| (*p, c.clone() * k)))
    }

    /// Multiplies by `w^s`.
    pub fn shift(&self, s: i64) -> Self {
        Laurent { terms: self.terms.iter().map(|(p, c)| (p + s, c.clone())).collect() }
    }

    /// `d/dw`.
    pub fn derivative(&self) -> Self {
        Laurent::from_terms(
            self.terms
                .iter()
                .filter(|(p, _)| **p != 0)
                .map(|(p, c)| (p - 1, c.clone() * &S::from_i64(*p))),
        )
    }

    /// `w · d/dw`.
    pub fn euler_derivative(&self) -> Self {
        Laurent::from_terms(self.terms.iter().map(|(p, c)| (*p, c.clone() * &S::from_i64(*p))))
    }

    /// The boundary reflection `f̄(1/w)`: conjugates coefficients and negates powers.
    pub fn reflect(&self) -> Self {
        Laurent { terms: self.terms.iter().map(|(p, c)| (-p, c.conj())).collect() }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Laurent::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, w: &S) -> S
    where
        S: std::ops::Div<Output = S>,
    {
        let mut acc = S::zero();
        for (p, c) in &self.terms {
            let wp = if *p >= 0 {
                (0..*p).fold(S::one(), |a, _| a * w)
            } else {
                S::one() / (0..-*p).fold(S::one(), |a, _| a * w)
            };
            acc = acc + c.clone() * &wp;
        }
        acc
    }

    /// Residue of `self · other` without forming the full product.
    pub fn residue_of_product(&self, other: &Self) -> S {
        let mut acc = S::zero();
        for (p, c) in &self.terms {
            if let Some(d) = other.terms.get(&(-1 - p)) {
                acc = acc + c.clone() * d;
            }
        }
        acc
    }

    /// Largest `|c_k|` over all coefficients.
    pub fn sup_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.to_c64().norm()).fold(0.0, f64::max)
    }
}

impl<'a, S: Scalar> Add<&'a Laurent<S>> for &'a Laurent<S> {
    type Output = Laurent<S>;
    fn add(self, rhs: &Laurent<S>) -> Laurent<S> {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(*p, c.clone());
        }
        out
    }
}

impl<'a, S: Scalar> Sub<&'a Laurent<S>> for &'a Laurent<S> {
    type Output = Laurent<S>;
    fn sub(self, rhs: &Laurent<S>) -> Laurent<S> {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.add_term(*p, -c.clone());
        }
        out
    }
}

impl<'a, S: Scalar> Mul<&'a Laurent<S>> for &'a Laurent<S> {
    type Output = Laurent<S>;
    fn mul(self, rhs: &Laurent<S>) -> Laurent<S> {
        let mut out = Laurent::zero();
        for (p1, c1) in &self.terms {
            for (p2, c2) in &rhs.terms {
                out.add_term(p1 + p2, c1.clone() * c2);
            }
        }
        out
    }
}

impl<S: Scalar> Neg for &Laurent<S> {
    type Output = Laurent<S>;
    fn neg(self) -> Laurent<S> {
        Laurent { terms: self.terms.iter().map(|(p, c)| (*p, -c.clone())).collect() }
    }
}

pub fn residue<S: Scalar>(f: &Laurent<S>) -> S {
    f.residue()
}

/// Substitutes `z → zw`, `z̄ → zbw` into `p` and expands.
///
/// For a conformal map these are the boundary restrictions `z(w)` and
/// `z̄(1/w)`.
pub fn compose_boundary<S: Scalar>(p: &BivarPoly, zw: &Laurent<S>, zbw: &Laurent<S>) -> Laurent<S> {
    let zp = power_table(zw, p.max_z_degree());
    let zbp = power_table(zbw, p.max_zbar_degree());
    let mut out = Laurent::zero();
    for (m, c) in p.terms() {
        let prod = &zp[m.a as usize] * &zbp[m.b as usize];
        out = &out + &prod.scale(&S::from_crat(c));
    }
    out
}

pub fn power_table<S: Scalar>(f: &Laurent<S>, n: u32) -> Vec<Laurent<S>> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(Laurent::one());
    for k in 1..=n as usize {
        let next = &out[k - 1] * f;
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> CRat {
        CRat::parse(s).unwrap()
    }

    #[test]
    fn residue_examples() {
        let f = LaurentPoly::from_terms([(-1, q("3")), (0, q("2")), (1, q("1"))]);
        assert_eq!(residue(&f), q("3"));
        assert_eq!(residue(&LaurentPoly::monomial(q("1"), 2)), CRat::zero());
        let r = q("2");
        let g = &(&LaurentPoly::monomial(r.clone(), 1) * &LaurentPoly::monomial(r.clone(), -1))
            * &LaurentPoly::monomial(q("1"), -1);
        assert_eq!(residue(&g), q("4"));
    }

    #[test]
    fn boundary_composition() {
        let r = q("3/2");
        let u = q("1/3+1/4i");
        let disk = LaurentPoly::monomial(r.clone(), 1);
        let zz = BivarPoly::parse("z*zb").unwrap();
        assert_eq!(compose_boundary(&zz, &disk, &disk.reflect()), LaurentPoly::constant(&r * &r));

        let z1 = q("1-2i");
        let shifted = &LaurentPoly::constant(z1.clone()) + &disk;
        assert_eq!(compose_boundary(&BivarPoly::z(), &shifted, &shifted.reflect()), shifted);

        let zw = &disk + &LaurentPoly::monomial(u.clone(), 2);
        let expect = LaurentPoly::from_terms([(-1, r.clone()), (-2, u.conj())]);
        assert_eq!(compose_boundary(&BivarPoly::zbar(), &zw, &zw.reflect()), expect);
    }

    #[test]
    fn product_residue_matches_full_product() {
        let f = LaurentPoly::from_terms([(-3, q("1/2")), (0, q("i")), (2, q("-3"))]);
        let g = LaurentPoly::from_terms([(-3, q("2")), (-1, q("1+i")), (2, q("7"))]);
        assert_eq!(f.residue_of_product(&g), residue(&(&f * &g)));
    }
}
