//! Exact linear algebra over the rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::algebra::{CRat, Rat};

/// Incremental row echelon form used to pick independent equations greedily.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    /// `(pivot column, row)` with the pivot entry normalized to 1.
    rows: Vec<(usize, Vec<Rat>)>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `row` if it is independent of the rows kept so far.
    pub fn try_insert(&mut self, row: &[Rat]) -> bool {
        let mut r = row.to_vec();
        for (col, basis) in &self.rows {
            if r[*col].is_zero() {
                continue;
            }
            let f = r[*col].clone();
            for (x, y) in r.iter_mut().zip(basis) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        match r.iter().position(|x| !x.is_zero()) {
            Some(col) => {
                let inv = r[col].recip();
                for x in r.iter_mut() {
                    *x *= &inv;
                }
                // Keep earlier rows reduced against the new pivot.
                for (_, basis) in self.rows.iter_mut() {
                    if basis[col].is_zero() {
                        continue;
                    }
                    let f = basis[col].clone();
                    for (x, y) in basis.iter_mut().zip(&r) {
                        if !y.is_zero() {
                            *x -= &f * y;
                        }
                    }
                }
                self.rows.push((col, r));
                true
            }
            None => false,
        }
    }
}

/// Solves the square system `a x = b` by fraction-free (Bareiss) elimination.
/// Rows are first scaled to integers. Returns `None` when `a` is singular.
pub fn bareiss_solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n) && b.len() == n, "system must be square");
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let lcm = row.iter().chain(std::iter::once(rhs)).fold(BigInt::one(), |l, x| l.lcm(x.denom()));
            row.iter()
                .chain(std::iter::once(rhs))
                .map(|x| (x * Rat::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, pivot);
        for i in (k + 1)..n {
            for j in (k + 1)..=n {
                let v = &m[k][k] * &m[i][j] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    let mut x = vec![Rat::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rat::from_integer(m[i][n].clone());
        for j in (i + 1)..n {
            acc -= Rat::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rat::from_integer(m[i][i].clone());
    }
    Some(x)
}

/// Gaussian elimination over `Q(i)` for a square system; `None` if singular.
pub fn solve_complex(a: &[Vec<CRat>], b: &[CRat]) -> Option<Vec<CRat>> {
    let n = a.len();
    let mut m: Vec<Vec<CRat>> = a.iter().zip(b).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
    for k in 0..n {
        let pivot = (k..n).find(|&i| !m[i][k].is_zero())?;
        m.swap(k, pivot);
        let inv = m[k][k].inv()?;
        for v in &mut m[k][k..] {
            *v = &*v * &inv;
        }
        let pivot_row = m[k].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == k || row[k].is_zero() {
                continue;
            }
            let f = row[k].clone();
            for (v, p) in row[k..].iter_mut().zip(&pivot_row[k..]) {
                *v = &*v - &(&f * p);
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn bareiss_matches_known_solution() {
        let a = vec![
            vec![rat(2, 1), rat(1, 3), rat(-1, 1)],
            vec![rat(1, 2), rat(0, 1), rat(4, 1)],
            vec![rat(3, 1), rat(-2, 5), rat(1, 1)],
        ];
        let x = vec![rat(1, 7), rat(-2, 1), rat(5, 3)];
        let b: Vec<Rat> = a.iter().map(|r| r.iter().zip(&x).map(|(p, q)| p * q).sum()).collect();
        assert_eq!(bareiss_solve(&a, &b).unwrap(), x);
        let singular = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(1, 2), rat(1, 1)]];
        assert!(bareiss_solve(&singular, &[rat(1, 1), rat(0, 1)]).is_none());
    }

    #[test]
    fn echelon_rank() {
        let mut e = Echelon::new();
        assert!(e.try_insert(&[rat(1, 1), rat(2, 1), rat(0, 1)]));
        assert!(!e.try_insert(&[rat(2, 1), rat(4, 1), rat(0, 1)]));
        assert!(e.try_insert(&[rat(0, 1), rat(1, 1), rat(1, 1)]));
        assert!(!e.try_insert(&[rat(1, 1), rat(3, 1), rat(1, 1)]));
        assert_eq!(e.rank(), 2);
    }
}
