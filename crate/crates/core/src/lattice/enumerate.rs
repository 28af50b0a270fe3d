//! Short and fixed-norm vector enumeration.
//!
//! Two routes: a coefficient-box backtracker that works for any symmetric
//! form (used where the form is indefinite), and LLL followed by
//! Fincke-Pohst for definite forms, which enumerates a norm ball completely.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::exact::{ceil, floor, rat, round_half_up, Rational};

use super::{LatticeVector, Sublattice};

/// Linear equalities `rows . x = 0` that every box hit must satisfy.
#[derive(Debug, Clone, Default)]
pub struct BoxConstraint {
    pub rows: Vec<Vec<BigInt>>,
}

struct BoxProblem {
    n: usize,
    bound: i128,
    gram: Vec<Vec<i128>>,
    rows: Vec<Vec<i128>>,
    target: i128,
    // bounds on sum_{i,j >= k} G_ij y_i y_j over the box
    quad_lo: Vec<i128>,
    quad_hi: Vec<i128>,
    // sum_{j >= k} |row_j| * bound
    row_slack: Vec<Vec<i128>>,
}

fn to_i128(x: &BigInt) -> i128 {
    x.to_i128().expect("entry fits in 128 bits")
}

impl BoxProblem {
    fn new(gram: &[Vec<BigInt>], cons: &BoxConstraint, target: i128, bound: u32) -> Self {
        let n = gram.len();
        let b = bound as i128;
        let gram: Vec<Vec<i128>> = gram.iter().map(|r| r.iter().map(to_i128).collect()).collect();
        let rows: Vec<Vec<i128>> = cons
            .rows
            .iter()
            .map(|r| r.iter().map(to_i128).collect())
            .collect();
        let mut quad_lo = vec![0i128; n + 1];
        let mut quad_hi = vec![0i128; n + 1];
        for k in (0..n).rev() {
            let d = gram[k][k] * b * b;
            let mut lo = d.min(0);
            let mut hi = d.max(0);
            for j in k + 1..n {
                let c = 2 * gram[k][j].abs() * b * b;
                lo -= c;
                hi += c;
            }
            quad_lo[k] = quad_lo[k + 1] + lo;
            quad_hi[k] = quad_hi[k + 1] + hi;
        }
        let row_slack = rows
            .iter()
            .map(|r| {
                let mut s = vec![0i128; n + 1];
                for k in (0..n).rev() {
                    s[k] = s[k + 1] + r[k].abs() * b;
                }
                s
            })
            .collect();
        BoxProblem {
            n,
            bound: b,
            gram,
            rows,
            target,
            quad_lo,
            quad_hi,
            row_slack,
        }
    }

    fn search(&self, prefix: &mut Vec<i128>, h: &mut Vec<i128>, q: i128, lin: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
        let k = prefix.len();
        // feasibility of the remaining quadratic contribution
        let lin_slack: i128 = h[k..].iter().map(|x| x.abs() * self.bound).sum();
        let lo = q + self.quad_lo[k] - lin_slack;
        let hi = q + self.quad_hi[k] + lin_slack;
        if self.target < lo || self.target > hi {
            return;
        }
        for (r, acc) in lin.iter().enumerate() {
            if acc.abs() > self.row_slack[r][k] {
                return;
            }
        }
        if k == self.n {
            if q == self.target {
                out.push(prefix.clone());
            }
            return;
        }
        for x in -self.bound..=self.bound {
            let dq = h[k] * x + self.gram[k][k] * x * x;
            for j in k + 1..self.n {
                h[j] += 2 * self.gram[k][j] * x;
            }
            for (r, acc) in lin.iter_mut().enumerate() {
                *acc += self.rows[r][k] * x;
            }
            prefix.push(x);
            self.search(prefix, h, q + dq, lin, out);
            prefix.pop();
            for (r, acc) in lin.iter_mut().enumerate() {
                *acc -= self.rows[r][k] * x;
            }
            for j in k + 1..self.n {
                h[j] -= 2 * self.gram[k][j] * x;
            }
        }
    }
}

/// All `x` with entries in `[-bound, bound]`, `x^T G x = target` and every
/// constraint row annihilating `x`, in lexicographic order. The top-level
/// coordinate range is split across worker threads.
pub fn box_search(
    gram: &[Vec<BigInt>],
    cons: &BoxConstraint,
    target: i64,
    bound: u32,
) -> Vec<Vec<BigInt>> {
    let n = gram.len();
    if n == 0 {
        return Vec::new();
    }
    let problem = BoxProblem::new(gram, cons, target as i128, bound);
    let b = bound as i128;
    let chunks: Vec<Vec<Vec<i128>>> = (-b..=b)
        .into_par_iter()
        .map(|x0| {
            let mut h = vec![0i128; n];
            for (j, hj) in h.iter_mut().enumerate().skip(1) {
                *hj = 2 * problem.gram[0][j] * x0;
            }
            let mut lin: Vec<i128> = problem.rows.iter().map(|r| r[0] * x0).collect();
            let mut out = Vec::new();
            let mut prefix = vec![x0];
            problem.search(&mut prefix, &mut h, problem.gram[0][0] * x0 * x0, &mut lin, &mut out);
            out
        })
        .collect();
    chunks
        .into_iter()
        .flatten()
        .map(|v| v.into_iter().map(BigInt::from).collect())
        .collect()
}

/// All vectors of self-pairing -2 whose basis coefficients lie in
/// `[-bound, bound]`, as ambient vectors in lexicographic coefficient order.
pub fn minus_two_vectors(sub: &Sublattice, bound: u32) -> Vec<LatticeVector> {
    if bound == 0 {
        return Vec::new();
    }
    box_search(&sub.gram(), &BoxConstraint::default(), -2, bound)
        .into_iter()
        .map(|c| LatticeVector::from_bigints(&sub.combine(&c)))
        .collect()
}

/// LLL reduction (delta = 3/4) of a positive definite Gram matrix.
///
/// Returns the transform `H` whose rows express the reduced basis in terms of
/// the input basis, and the reduced Gram matrix `H G H^T`.
pub fn lll_reduce(gram: &[Vec<BigInt>]) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let n = gram.len();
    let mut a: Vec<Vec<BigInt>> = gram.to_vec();
    let mut h: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::from(1);
            e
        })
        .collect();
    if n <= 1 {
        return (h, a);
    }
    let mut mu = vec![vec![Rational::zero(); n]; n];
    let mut bb = vec![Rational::zero(); n];
    bb[0] = Rational::from_integer(a[0][0].clone());
    let mut k = 1;
    let mut kmax = 0;
    let half = rat(1, 2);
    let delta = rat(3, 4);

    let reduce = |k: usize, l: usize, a: &mut Vec<Vec<BigInt>>, h: &mut Vec<Vec<BigInt>>, mu: &mut Vec<Vec<Rational>>| {
        if mu[k][l].abs() <= half {
            return;
        }
        let q = round_half_up(&mu[k][l]);
        let qr = Rational::from_integer(q.clone());
        let (hl, al) = (h[l].clone(), a[l].clone());
        for (x, y) in h[k].iter_mut().zip(&hl) {
            *x -= &q * y;
        }
        let akl = a[k][l].clone();
        let akk = &a[k][k] - &q * &akl * 2 + &q * &q * &a[l][l];
        for j in 0..a.len() {
            if j != k {
                let v = &a[k][j] - &q * &al[j];
                a[k][j] = v.clone();
                a[j][k] = v;
            }
        }
        a[k][k] = akk;
        mu[k][l] -= &qr;
        for i in 0..l {
            let v = &qr * &mu[l][i];
            mu[k][i] -= v;
        }
    };

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..k {
                let mut s = Rational::from_integer(a[k][j].clone());
                for i in 0..j {
                    s -= &mu[j][i] * &mu[k][i] * &bb[i];
                }
                mu[k][j] = s / &bb[j];
            }
            let mut s = Rational::from_integer(a[k][k].clone());
            for j in 0..k {
                s -= &mu[k][j] * &mu[k][j] * &bb[j];
            }
            bb[k] = s;
        }
        reduce(k, k - 1, &mut a, &mut h, &mut mu);
        if bb[k] < (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bb[k - 1] {
            h.swap(k, k - 1);
            a.swap(k, k - 1);
            for row in a.iter_mut() {
                row.swap(k, k - 1);
            }
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            let m = mu[k][k - 1].clone();
            let b = &bb[k] + &m * &m * &bb[k - 1];
            mu[k][k - 1] = &m * &bb[k - 1] / &b;
            bb[k] = &bb[k - 1] * &bb[k] / &b;
            bb[k - 1] = b;
            for i in k + 1..=kmax {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &t;
                mu[i][k - 1] = t + &mu[k][k - 1] * &mu[i][k];
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(k, l, &mut a, &mut h, &mut mu);
            }
            k += 1;
        }
    }
    (h, a)
}

/// Every nonzero `x` with `x^T A x <= bound` for a positive definite integer
/// Gram matrix `A`, both signs included, in lexicographic order.
///
/// Square completion is exact; the per-level coordinate range is estimated
/// in floating point, widened by one on each side, then every candidate is
/// checked against the exact remaining budget.
pub fn fincke_pohst(a: &[Vec<BigInt>], bound: &Rational) -> Vec<Vec<BigInt>> {
    let n = a.len();
    if n == 0 {
        return Vec::new();
    }
    let mut q: Vec<Vec<Rational>> = a
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    for i in 0..n {
        assert!(q[i][i] > Rational::zero(), "form must be positive definite");
        for j in i + 1..n {
            q[j][i] = q[i][j].clone();
            q[i][j] = &q[i][j] / &q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                let v = &q[k][i] * &q[i][l];
                q[k][l] -= v;
            }
        }
    }
    let mut out = Vec::new();
    let mut x = vec![BigInt::zero(); n];
    fp_level(&q, n - 1, bound.clone(), &mut x, &mut out);
    out.retain(|v| v.iter().any(|c| !c.is_zero()));
    out.sort();
    out
}

fn fp_level(q: &[Vec<Rational>], i: usize, budget: Rational, x: &mut Vec<BigInt>, out: &mut Vec<Vec<BigInt>>) {
    let n = q.len();
    let mut u = Rational::zero();
    for j in i + 1..n {
        if !x[j].is_zero() {
            u += &q[i][j] * Rational::from_integer(x[j].clone());
        }
    }
    let ratio = (&budget / &q[i][i]).to_f64().unwrap_or(f64::INFINITY).max(0.0);
    let radius = ratio.sqrt();
    let centre = -u.to_f64().unwrap_or(0.0);
    let lo: BigInt = ceil(&Rational::from_float(centre - radius).unwrap_or_else(Rational::zero)) - 1;
    let hi: BigInt = floor(&Rational::from_float(centre + radius).unwrap_or_else(Rational::zero)) + 1;
    let mut v = lo;
    while v <= hi {
        let t = Rational::from_integer(v.clone()) + &u;
        let used = &q[i][i] * &t * &t;
        if used <= budget {
            x[i] = v.clone();
            let rest = &budget - used;
            if i == 0 {
                out.push(x.clone());
            } else {
                fp_level(q, i - 1, rest, x, out);
            }
        }
        v += 1;
    }
    x[i] = BigInt::zero();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::GramLattice;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn hyperbolic_plane_roots() {
        let u = GramLattice::from_gram(vec![vec![0, 1], vec![1, 0]]);
        let sub = Sublattice::new(u.clone(), big(&[&[1, 0], &[0, 1]])).unwrap();
        let got: Vec<_> = minus_two_vectors(&sub, 1);
        assert_eq!(
            got,
            vec![LatticeVector::from_ints(&[-1, 1]), LatticeVector::from_ints(&[1, -1])]
        );
        assert!(minus_two_vectors(&sub, 0).is_empty());
        for d in minus_two_vectors(&sub, 3) {
            assert_eq!(u.pair(&d, &d).unwrap(), crate::exact::QuadScalar::int(-2));
        }
    }

    #[test]
    fn a2_root_count() {
        let a2 = big(&[&[2, -1], &[-1, 2]]);
        let (h, red) = lll_reduce(&a2);
        assert_eq!(h.len(), 2);
        assert_eq!(red[0][0], BigInt::from(2));
        assert_eq!(fincke_pohst(&a2, &rat(2, 1)).len(), 6);
    }

    #[test]
    fn lll_shrinks_a_skewed_basis() {
        // Z^2 with basis (1,0), (7,1)
        let g = big(&[&[1, 7], &[7, 50]]);
        let (h, red) = lll_reduce(&g);
        assert_eq!(red[0][0], BigInt::from(1));
        assert_eq!(red[1][1], BigInt::from(1));
        let det = &h[0][0] * &h[1][1] - &h[0][1] * &h[1][0];
        assert_eq!(det.abs(), BigInt::from(1));
    }
}
