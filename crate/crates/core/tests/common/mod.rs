//! Brute-force oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use k3_attractor::exact::{QuadComplex, QuadScalar};
use k3_attractor::forms::BinaryEvenForm;
use k3_attractor::lattice::{
    mukai, ComplexVector, LatticeVector, Sublattice, E8_A, E8_B, RANK, R_SLOT, S_SLOT, U1, U2, U3,
};
use k3_attractor::mirror::{tube_map, SplitData};
use k3_attractor::stability::{MukaiVector, StabilityPoint};
use num_bigint::BigInt;
use rand::Rng;

pub fn unit(i: usize) -> LatticeVector {
    mukai().unit(i)
}

pub fn int_vec(pairs: &[(usize, i64)]) -> LatticeVector {
    let mut v = LatticeVector::zero(RANK);
    for &(i, x) in pairs {
        v.coords[i] = QuadScalar::int(x);
    }
    v
}

/// Every reduced even form of discriminant `d`, found by scanning all
/// `1 <= a <= 2d`, `|b| <= a` without using any bound from reduction theory.
pub fn naive_reduced_forms(d: i64) -> Vec<BinaryEvenForm> {
    let mut out = Vec::new();
    for a in 1..=2 * d {
        for b in -a..=a {
            let num = d + b * b;
            if num % a != 0 {
                continue;
            }
            let c = num / a;
            if a % 2 != 0 || c % 2 != 0 {
                continue;
            }
            let reduced = -a < 2 * b && 2 * b <= a && a <= c && (a != c || b >= 0);
            if reduced {
                out.push(BinaryEvenForm { a, b, c });
            }
        }
    }
    out.sort();
    out
}

/// Coefficient vectors in `[-bound, bound]^k` of self-pairing `target`,
/// in lexicographic order, by exhaustive odometer.
pub fn naive_grid(gram: &[Vec<i64>], target: i64, bound: i64, keep: impl Fn(&[i64]) -> bool) -> Vec<Vec<i64>> {
    let k = gram.len();
    let mut out = Vec::new();
    let mut x = vec![-bound; k];
    loop {
        let mut q = 0i64;
        for i in 0..k {
            for j in 0..k {
                q += x[i] * gram[i][j] * x[j];
            }
        }
        if q == target && keep(&x) {
            out.push(x.clone());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if x[i] < bound {
                x[i] += 1;
                for y in x.iter_mut().skip(i + 1) {
                    *y = -bound;
                }
                break;
            }
        }
    }
}

pub fn small_gram(sub: &Sublattice) -> Vec<Vec<i64>> {
    sub.gram()
        .iter()
        .map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect())
        .collect()
}

pub fn combine(sub: &Sublattice, c: &[i64]) -> LatticeVector {
    let c: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
    LatticeVector::from_bigints(&sub.combine(&c))
}

/// Naive falsifier: `(r, coefficients, s)` over the full box, keeping the
/// (-2)-classes with `(Psi, delta) = 0`.
pub fn naive_falsifier(psi: &StabilityPoint, ns: &Sublattice, bound: i64) -> Vec<MukaiVector> {
    let k = ns.rank();
    let g = small_gram(ns);
    let mut ext = vec![vec![0i64; k + 2]; k + 2];
    for i in 0..k {
        for j in 0..k {
            ext[i + 1][j + 1] = g[i][j];
        }
    }
    ext[0][k + 1] = -1;
    ext[k + 1][0] = -1;
    let to_mukai = |y: &[i64]| {
        let mut v = combine(ns, &y[1..=k]);
        v.coords[R_SLOT] = QuadScalar::int(y[0]);
        v.coords[S_SLOT] = QuadScalar::int(y[k + 1]);
        MukaiVector::from_lattice(&v).unwrap()
    };
    naive_grid(&ext, -2, bound, |y| {
        let v = to_mukai(y).lattice_vector();
        mukai()
            .pair_complex(&psi.psi, &ComplexVector::real(v))
            .unwrap()
            .is_zero()
    })
    .iter()
    .map(|y| to_mukai(y))
    .collect()
}

fn random_e8(rng: &mut impl Rng, start: usize) -> Vec<(usize, i64)> {
    (start..start + 8).map(|i| (i, rng.random_range(-1..=1))).collect()
}

/// A positive vector in the hyperbolic plane at `u` plus a random part in
/// the E8 block at `e8`.
fn positive_with_e8(rng: &mut impl Rng, u: usize, e8: usize) -> LatticeVector {
    loop {
        let mut pairs = random_e8(rng, e8);
        pairs.push((u, rng.random_range(1..=6)));
        pairs.push((u + 1, rng.random_range(1..=6)));
        let v = int_vec(&pairs);
        if mukai().pair(&v, &v).unwrap().is_positive() {
            return v;
        }
    }
}

/// A valid period triple `(Omega, omega, B)` for the standard split:
/// `Omega = lambda a(z)` with `z = B' + i omega'` in `Gamma'`, and
/// `omega = y - (y.B') v` with `y . omega' = 0`, so `Omega^2 = 0`,
/// `Omega.conj(Omega) > 0`, `omega ⊥ Omega` and `omega^2 > 0`.
pub fn random_valid_triple(rng: &mut impl Rng) -> (ComplexVector, LatticeVector, LatticeVector) {
    let split = SplitData::standard();
    let pair = |x: &LatticeVector, y: &LatticeVector| mukai().pair(x, y).unwrap();
    let omega_prime = positive_with_e8(rng, U2, E8_A);
    let y = positive_with_e8(rng, U3, E8_B);
    let b_prime: Vec<(usize, i64)> = (U2..E8_B + 8).map(|i| (i, rng.random_range(-2..=2))).collect();
    let b_prime = int_vec(&b_prime);
    let z = ComplexVector::new(b_prime.clone(), omega_prime);
    let mut lambda = 0;
    while lambda == 0 {
        lambda = rng.random_range(-3..=3);
    }
    let period = tube_map(&split, &z)
        .unwrap()
        .scale(&QuadComplex::real(QuadScalar::frac(lambda, rng.random_range(1..=4))));
    let omega = &y - &split.v.scale(&pair(&y, &b_prime));
    let mut b: Vec<(usize, i64)> = (U2..E8_B + 8).map(|i| (i, rng.random_range(-2..=2))).collect();
    b.push((U1, rng.random_range(-3..=3)));
    (period, omega, int_vec(&b))
}
