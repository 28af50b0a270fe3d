//! Integer kernels by unimodular row reduction, and small dense rational
//! linear algebra.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::exact::{QuadScalar, Rational};

use super::clear_denominators;

/// Scales every rational row by its common denominator.
pub fn split_rows(rows: &[Vec<Rational>]) -> Vec<Vec<BigInt>> {
    rows.iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .map(|r| clear_denominators(r))
        .collect()
}

/// Integral basis of `{x in Z^n : A x = 0}`, saturated.
///
/// Reduces `[A^T | I]` with unimodular row operations, pivoting on the entry
/// of least absolute value; rows whose left block vanishes carry the kernel.
/// Coordinates that no row of `A` touches come out as unit vectors.
pub fn integer_kernel(a: &[Vec<BigInt>], n: usize) -> Vec<Vec<BigInt>> {
    let k = a.len();
    let mut left: Vec<Vec<BigInt>> = (0..n)
        .map(|i| a.iter().map(|row| row[i].clone()).collect())
        .collect();
    let mut right: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::from(1);
            e
        })
        .collect();
    let mut live: Vec<usize> = (0..n).collect();
    for col in 0..k {
        loop {
            let nonzero: Vec<usize> = live
                .iter()
                .copied()
                .filter(|&i| !left[i][col].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                if let Some(&p) = nonzero.first() {
                    live.retain(|&i| i != p);
                }
                break;
            }
            let p = *nonzero
                .iter()
                .min_by(|&&x, &&y| left[x][col].abs().cmp(&left[y][col].abs()).then(x.cmp(&y)))
                .unwrap();
            for &i in &nonzero {
                if i == p {
                    continue;
                }
                let q = left[i][col].div_floor(&left[p][col]);
                if q.is_zero() {
                    continue;
                }
                let (lp, rp) = (left[p].clone(), right[p].clone());
                for (x, y) in left[i].iter_mut().zip(&lp) {
                    *x -= &q * y;
                }
                for (x, y) in right[i].iter_mut().zip(&rp) {
                    *x -= &q * y;
                }
            }
        }
    }
    live.sort_unstable();
    live.into_iter()
        .map(|i| {
            let mut v = right[i].clone();
            super::gcd_normalize(&mut v);
            v
        })
        .collect()
}

/// Rank over the rationals.
pub fn rational_rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Solves `A x = b` for the unique `x` when it exists; `None` if inconsistent
/// or underdetermined.
pub fn rational_solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][c].recip();
        for x in m[rank].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    if (rank..rows).any(|r| !m[r][cols].is_zero()) || rank < cols {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

/// Rank of a matrix over a real quadratic field `Q(sqrt(m))`.
pub fn field_rank(rows: &[Vec<QuadScalar>]) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            if !m[r][c].is_zero() {
                let f = &m[r][c] / &m[rank][c];
                let pivot = m[rank].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn rational_inverse(a: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = a.len();
    let mut cols = vec![Vec::with_capacity(n); n];
    for (j, col) in cols.iter_mut().enumerate() {
        let e: Vec<Rational> = (0..n)
            .map(|i| if i == j { Rational::from_integer(1.into()) } else { Rational::zero() })
            .collect();
        *col = rational_solve(a, &e)?;
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}
