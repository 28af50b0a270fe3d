//! Positive definite even binary forms `[[a, b], [b, c]]`, their Gauss
//! reduction and proper (SL2) equivalence.
//!
//! Reduced means `-a < 2b <= a <= c`, with `b >= 0` whenever `a == c`.
//! Orientation of the transcendental lattice plays no role here: the period
//! ratio convention only fixes which of `tau`, `conj(tau)` is used, and every
//! formula downstream takes the upper half-plane root.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::QuadScalar;
use crate::lattice::{GramLattice, LatticeError, LatticeVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("diagonal entries must be even, got a = {0}, c = {1}")]
    OddDiagonal(i64, i64),
    #[error("form [{0}, {1}, {2}] is not positive definite")]
    NotPositive(i64, i64, i64),
    #[error("pairings are not integral")]
    NotIntegral,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[i64; 3]", try_from = "[i64; 3]")]
pub struct BinaryEvenForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryEvenForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self, FormError> {
        if a % 2 != 0 || c % 2 != 0 {
            return Err(FormError::OddDiagonal(a, c));
        }
        if a <= 0 || c <= 0 || a * c - b * b <= 0 {
            return Err(FormError::NotPositive(a, b, c));
        }
        Ok(BinaryEvenForm { a, b, c })
    }

    /// `(p^2, p.q, q^2)` of two lattice vectors.
    pub fn from_vectors(
        lattice: &GramLattice,
        p: &LatticeVector,
        q: &LatticeVector,
    ) -> Result<Self, FormError> {
        let int = |x: QuadScalar| {
            x.to_integer()
                .and_then(|n| i64::try_from(n).ok())
                .ok_or(FormError::NotIntegral)
        };
        let a = int(lattice.pair(p, p)?)?;
        let b = int(lattice.pair(p, q)?)?;
        let c = int(lattice.pair(q, q)?)?;
        Self::new(a, b, c)
    }

    pub fn discriminant(&self) -> i64 {
        self.a * self.c - self.b * self.b
    }

    pub fn is_reduced(&self) -> bool {
        -self.a < 2 * self.b && 2 * self.b <= self.a && self.a <= self.c && (self.a != self.c || self.b >= 0)
    }

    fn matrix(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.b, self.c]]
    }

    /// `r^T Q r`.
    pub fn transform(&self, r: &Sl2Witness) -> BinaryEvenForm {
        let q = self.matrix();
        let m = r.m;
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = (0..2)
                    .flat_map(|k| (0..2).map(move |l| (k, l)))
                    .map(|(k, l)| m[k][i] * q[k][l] * m[l][j])
                    .sum();
            }
        }
        BinaryEvenForm {
            a: out[0][0],
            b: out[0][1],
            c: out[1][1],
        }
    }
}

impl From<BinaryEvenForm> for [i64; 3] {
    fn from(f: BinaryEvenForm) -> Self {
        [f.a, f.b, f.c]
    }
}

impl TryFrom<[i64; 3]> for BinaryEvenForm {
    type Error = FormError;
    fn try_from(v: [i64; 3]) -> Result<Self, FormError> {
        BinaryEvenForm::new(v[0], v[1], v[2])
    }
}

impl fmt::Display for BinaryEvenForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

/// An integer matrix of determinant one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sl2Witness {
    pub m: [[i64; 2]; 2],
}

impl Sl2Witness {
    pub fn identity() -> Self {
        Sl2Witness { m: [[1, 0], [0, 1]] }
    }

    pub fn new(m: [[i64; 2]; 2]) -> Option<Self> {
        (m[0][0] * m[1][1] - m[0][1] * m[1][0] == 1).then_some(Sl2Witness { m })
    }

    pub fn det(&self) -> i64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = (self.m, other.m);
        let mut out = [[0i64; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Sl2Witness { m: out }
    }

    pub fn inverse(&self) -> Self {
        let m = self.m;
        Sl2Witness {
            m: [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]],
        }
    }
}

/// Reduced representative `R` and `r` with `Q = r^T R r`.
pub fn gauss_reduce(q: &BinaryEvenForm) -> (BinaryEvenForm, Sl2Witness) {
    let mut cur = *q;
    let mut r = Sl2Witness::identity();
    loop {
        // translate b into (-a/2, a/2]
        let k = (cur.a - 2 * cur.b).div_euclid(2 * cur.a);
        if k != 0 {
            let g = Sl2Witness { m: [[1, k], [0, 1]] };
            cur = cur.transform(&g);
            r = g.inverse().mul(&r);
        }
        if cur.a > cur.c || (cur.a == cur.c && cur.b < 0) {
            let g = Sl2Witness { m: [[0, -1], [1, 0]] };
            cur = cur.transform(&g);
            r = g.inverse().mul(&r);
            continue;
        }
        break;
    }
    debug_assert!(cur.is_reduced());
    assert_eq!(cur.transform(&r), *q, "reduction witness failed to verify");
    (cur, r)
}

/// `r` with `Q1 = r^T Q2 r` when the two forms are properly equivalent.
pub fn sl2_equivalent(q1: &BinaryEvenForm, q2: &BinaryEvenForm) -> Option<Sl2Witness> {
    let (red1, r1) = gauss_reduce(q1);
    let (red2, r2) = gauss_reduce(q2);
    if red1 != red2 {
        return None;
    }
    let r = r2.inverse().mul(&r1);
    assert_eq!(q2.transform(&r), *q1, "equivalence witness failed to verify");
    Some(r)
}

/// Every reduced even form of discriminant `d`, sorted by `(a, b, c)`.
pub fn enumerate_reduced(d: i64) -> Vec<BinaryEvenForm> {
    if d <= 0 {
        return Vec::new();
    }
    // reduced forms satisfy 3a^2 <= 4d
    let a_max = (1..).take_while(|a: &i64| 3 * a * a <= 4 * d).last().unwrap_or(0);
    let evens: Vec<i64> = (2..=a_max).step_by(2).collect();
    let mut out: Vec<BinaryEvenForm> = evens
        .par_iter()
        .flat_map_iter(|&a| {
            (-a / 2..=a / 2).filter_map(move |b| {
                let num = d + b * b;
                if num % a != 0 {
                    return None;
                }
                let f = BinaryEvenForm::new(a, b, num / a).ok()?;
                f.is_reduced().then_some(f)
            })
        })
        .collect();
    out.sort();
    out
}
