//! Intertwining operators `T` with `T ∘ (2∂∂̄) = L ∘ T`.
//!
//! In cleared form the identity reads `D ∘ T = F · T ∘ (2∂∂̄)`, where `D = F·L`
//! is returned by [`build_elliptic_operator`](super::build_elliptic_operator)
//! and `F` by [`clearing_factor`].

use num_traits::Zero;

use crate::algebra::{determinant, BivarPoly, CRat, Rat, TrigLaurent};
use crate::error::{Error, Result};

use super::diffop::DiffOperator;
use super::elliptic::{build_unchecked, clearing_factor, power_x_line};
use super::profile::CoefficientProfile;

/// `D ∘ T − F · T ∘ (2∂∂̄)` as an operator; zero iff `T` intertwines.
pub fn intertwining_defect(profile: &CoefficientProfile, t: &DiffOperator) -> Result<DiffOperator> {
    let d = build_unchecked(profile)?;
    let f = clearing_factor(profile);
    let lhs = d.compose(t);
    let rhs = t.compose(&DiffOperator::laplacian()).premultiply(&f);
    Ok(lhs.sub(&rhs))
}

/// First monomial `z^a z̄^b` with `a + b <= max_degree` on which the cleared
/// intertwining identity fails, if any.
pub fn first_failing_monomial(
    profile: &CoefficientProfile,
    t: &DiffOperator,
    max_degree: u32,
) -> Result<Option<(u32, u32)>> {
    let d = build_unchecked(profile)?;
    let f = clearing_factor(profile);
    let lap = DiffOperator::laplacian();
    for deg in 0..=max_degree {
        for a in 0..=deg {
            let g = BivarPoly::monomial(CRat::one(), a, deg - a);
            let lhs = d.apply(&t.apply(&g));
            let rhs = &f * &t.apply(&lap.apply(&g));
            if lhs != rhs {
                return Ok(Some((a, deg - a)));
            }
        }
    }
    Ok(None)
}

/// `T_n^(n)` for `κ = X^(-2n)`, in the unshifted frame `x1 = 0`.
pub fn build_power_x_intertwiner(n: u32) -> Result<DiffOperator> {
    power_x_intertwiner(n, &Rat::zero())
}

/// `T_n^(n) = F_n ∘ ⋯ ∘ F_1` with `F_k = (X + x1) ∂_X − (2k − 1)` and
/// `∂_X = ∂_z + ∂_z̄`. The result is validated against the intertwining
/// identity before it is returned.
pub fn power_x_intertwiner(n: u32, x1: &Rat) -> Result<DiffOperator> {
    let line = power_x_line(x1);
    let mut t = DiffOperator::identity();
    for k in 1..=n {
        let mut factor = DiffOperator::from_part(1, 0, line.clone());
        factor.add_part(0, 1, line.clone());
        factor.add_part(0, 0, BivarPoly::constant(CRat::int(-(2 * k as i64 - 1))));
        t = factor.compose(&t);
    }
    if n > 0 {
        let profile = CoefficientProfile::PowerX { n, x1: x1.clone() };
        let defect = intertwining_defect(&profile, &t)?;
        if !defect.is_zero() {
            return Err(Error::IntertwinerValidation(format!(
                "power-x factor chain for n = {n} leaves defect of order {}",
                defect.order()
            )));
        }
    }
    Ok(t)
}

/// Coefficients `a_k` of `T_n^(n) = Σ_k a_k X^k ∂_X^k`, for `k = 0..=n`
/// (`a_n = 1`).
///
/// The chain is the polynomial `Π (θ − (2k−1))` in the Euler operator
/// `θ = X∂_X`, rewritten in falling factorials `X^k ∂_X^k = θ(θ−1)⋯(θ−k+1)`.
pub fn power_x_euler_coefficients(n: u32) -> Vec<i64> {
    // Power basis coefficients of Π (θ − (2k−1)).
    let mut poly = vec![1i64];
    for k in 1..=n as i64 {
        let root = 2 * k - 1;
        let mut next = vec![0i64; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= root * c;
        }
        poly = next;
    }
    // θ^j = Σ_k S(j, k) θ^(k) with Stirling numbers of the second kind.
    let deg = poly.len();
    let mut stirling = vec![vec![0i64; deg]; deg];
    stirling[0][0] = 1;
    for j in 1..deg {
        for k in 1..=j {
            stirling[j][k] = k as i64 * stirling[j - 1][k] + stirling[j - 1][k - 1];
        }
    }
    (0..deg).map(|k| (0..deg).map(|j| poly[j] * stirling[j][k]).sum()).collect()
}

/// Wronskian intertwiner for the dihedral family `(n, l, m)`.
#[derive(Clone, Debug)]
pub struct DihedralIntertwiner {
    n: u32,
    l: u32,
    m: u32,
    seeds: Vec<TrigLaurent>,
    operator: DiffOperator,
}

/// Builds and validates the Wronskian intertwiner `T_{n,l;m}`.
pub fn build_dihedral_intertwiner(n: u32, l: u32, m: u32) -> Result<DihedralIntertwiner> {
    CoefficientProfile::Dihedral { n, l, m }.validate()?;
    let t = DihedralIntertwiner::assemble(n, l, m)?;
    let defect = intertwining_defect(&CoefficientProfile::Dihedral { n, l, m }, &t.operator)?;
    if !defect.is_zero() {
        return Err(Error::IntertwinerValidation(format!(
            "Wronskian operator for (n, l, m) = ({n}, {l}, {m}) does not intertwine"
        )));
    }
    for p in 0..=3 {
        let direct = t.apply_power(p)?;
        let via_op = t.operator.apply(&BivarPoly::monomial(CRat::one(), p, 0));
        if direct != via_op {
            return Err(Error::IntertwinerValidation(format!(
                "Wronskian evaluation and operator form disagree on z^{p}"
            )));
        }
    }
    Ok(t)
}

impl DihedralIntertwiner {
    /// Assembles the operator without checking `n > l` or the intertwining
    /// identity. Used to probe parameter sets outside the admissible range.
    pub fn assemble(n: u32, l: u32, m: u32) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::InvalidProfile("dihedral intertwiner needs n >= 1 and m >= 1".into()));
        }
        let seeds = dihedral_seeds(n, l, m);
        // Rows ψ_i, columns ∂_θ^j for j = 0..=n.
        let rows: Vec<Vec<TrigLaurent>> = seeds
            .iter()
            .map(|psi| {
                let mut row = vec![psi.clone()];
                for j in 1..=n as usize {
                    let next = row[j - 1].d_theta();
                    row.push(next);
                }
                row
            })
            .collect();
        let den = wronskian_denominator(n, l, m);
        let grade = (m * (n + l)) as i64;
        let theta = DiffOperator::theta_derivative();
        let mut op = DiffOperator::zero();
        let mut theta_pow = DiffOperator::identity();
        for j in 0..=n as usize {
            // Cofactor of entry (n, j) of the (n+1)×(n+1) Wronskian matrix.
            let minor: Vec<Vec<TrigLaurent>> = rows
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect())
                .collect();
            let mut cof = if minor.is_empty() || minor[0].is_empty() {
                TrigLaurent::constant(m, CRat::one())
            } else {
                determinant(&minor)?
            };
            if (n as usize + j) % 2 == 1 {
                cof = cof.scale(&CRat::int(-1));
            }
            let coeff = cof.div_exact(&den)?.with_rho_power(grade).to_bivar()?;
            op = op.add(&theta_pow.premultiply(&coeff));
            theta_pow = theta_pow.compose(&theta);
        }
        Ok(DihedralIntertwiner { n, l, m, seeds, operator: op })
    }

    pub fn params(&self) -> (u32, u32, u32) {
        (self.n, self.l, self.m)
    }

    pub fn seeds(&self) -> &[TrigLaurent] {
        &self.seeds
    }

    pub fn operator(&self) -> &DiffOperator {
        &self.operator
    }

    pub fn apply(&self, f: &BivarPoly) -> BivarPoly {
        self.operator.apply(f)
    }

    /// `T[z^p]` evaluated directly from the Wronskian in trigonometric form.
    pub fn apply_power(&self, p: u32) -> Result<BivarPoly> {
        let (n, l, m) = (self.n, self.l, self.m);
        let mut rows: Vec<Vec<TrigLaurent>> = Vec::with_capacity(n as usize + 1);
        let target = TrigLaurent::exp(1, p as i64, CRat::one());
        for f in self.seeds.iter().map(|s| s.refine(1)).chain(std::iter::once(Ok(target))) {
            let mut row = vec![f?];
            for j in 1..=n as usize {
                let next = row[j - 1].d_theta();
                row.push(next);
            }
            rows.push(row);
        }
        let w = determinant(&rows)?;
        let den = wronskian_denominator(n, l, m).refine(1)?;
        let grade = (m * (n + l) + p) as i64;
        w.div_exact(&den)?.with_rho_power(grade).to_bivar()
    }
}

/// `ψ_k = sin(f_k (mθ + π/2))` with `f_k = k` for `k <= n − l` and
/// `f_k = 2k + l − n` for the remaining `l` seeds.
pub fn dihedral_seeds(n: u32, l: u32, m: u32) -> Vec<TrigLaurent> {
    (1..=n as i64)
        .map(|k| {
            let f = if k <= (n as i64 - l as i64) { k } else { 2 * k + l as i64 - n as i64 };
            TrigLaurent::sin_quarter_shifted(m, f)
        })
        .collect()
}

/// `cos(mθ)^(n(n−1)/2) · sin(mθ)^(l(l−1)/2)`.
fn wronskian_denominator(n: u32, l: u32, m: u32) -> TrigLaurent {
    let c = TrigLaurent::cos(m, 1).pow(n * n.saturating_sub(1) / 2);
    let s = TrigLaurent::sin(m, 1).pow(l * l.saturating_sub(1) / 2);
    c.mul(&s).expect("same unit")
}
