//! The rank-24 Mukai lattice `3U + 2E8(-1) + U`, its vectors, and sublattices
//! described by integral bases.
//!
//! Coordinates follow one fixed order everywhere:
//! `[U1 e1, U1 e2, U2 e1, U2 e2, U3 e1, U3 e2, E8#1 (8), E8#2 (8), r, s]`.
//! The first 22 coordinates span the K3 lattice; the last two carry the
//! rank `r` and the Euler-characteristic slot `s` of a Mukai vector.

mod enumerate;
mod kernel;

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::LazyLock;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{common_denominator, rat_int, QuadComplex, QuadScalar, Rational};

pub use enumerate::{
    box_search, fincke_pohst, lll_reduce, minus_two_vectors, BoxConstraint,
};
pub use kernel::{
    field_rank, integer_kernel, rational_inverse, rational_rank, rational_solve, split_rows,
};

pub const RANK: usize = 24;
pub const K3_RANK: usize = 22;
pub const U1: usize = 0;
pub const U2: usize = 2;
pub const U3: usize = 4;
pub const E8_A: usize = 6;
pub const E8_B: usize = 14;
pub const R_SLOT: usize = 22;
pub const S_SLOT: usize = 23;

/// Edges of the E8 Dynkin diagram in Bourbaki numbering, zero-based.
const E8_EDGES: [(usize, usize); 7] = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not integral")]
    NotIntegral,
    #[error("basis is linearly dependent")]
    Dependent,
    #[error(transparent)]
    Arith(#[from] crate::exact::ArithError),
}

/// A lattice given by a symmetric integer Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramLattice {
    pub rank: usize,
    pub gram: Vec<Vec<i64>>,
    pub labels: Vec<String>,
    #[serde(skip)]
    rows: Vec<Vec<(usize, i64)>>,
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>, labels: Vec<String>) -> Result<Self, LatticeError> {
        let rank = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != rank {
                return Err(LatticeError::DimensionMismatch {
                    expected: rank,
                    got: row.len(),
                });
            }
            for j in 0..rank {
                assert_eq!(row[j], gram[j][i], "gram matrix must be symmetric");
            }
        }
        if labels.len() != rank {
            return Err(LatticeError::DimensionMismatch {
                expected: rank,
                got: labels.len(),
            });
        }
        let rows = gram
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &g)| g != 0)
                    .map(|(j, &g)| (j, g))
                    .collect()
            })
            .collect();
        Ok(GramLattice {
            rank,
            gram,
            labels,
            rows,
        })
    }

    pub fn from_gram(gram: Vec<Vec<i64>>) -> Self {
        let labels = (0..gram.len()).map(|i| format!("b{i}")).collect();
        Self::new(gram, labels).expect("square gram matrix")
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank).all(|i| self.gram[i][i] % 2 == 0)
    }

    fn check(&self, len: usize) -> Result<(), LatticeError> {
        if len != self.rank {
            return Err(LatticeError::DimensionMismatch {
                expected: self.rank,
                got: len,
            });
        }
        Ok(())
    }

    pub fn pair(&self, x: &LatticeVector, y: &LatticeVector) -> Result<QuadScalar, LatticeError> {
        self.check(x.len())?;
        self.check(y.len())?;
        let mut acc = QuadScalar::zero();
        for (i, row) in self.rows.iter().enumerate() {
            if x.coords[i].is_zero() {
                continue;
            }
            let mut gy = QuadScalar::zero();
            for &(j, g) in row {
                if !y.coords[j].is_zero() {
                    gy = gy.try_add(&y.coords[j].scale(&rat_int(g)))?;
                }
            }
            acc = acc.try_add(&x.coords[i].try_mul(&gy)?)?;
        }
        Ok(acc)
    }

    pub fn pair_int(&self, x: &[BigInt], y: &[BigInt]) -> BigInt {
        assert_eq!(x.len(), self.rank);
        assert_eq!(y.len(), self.rank);
        let mut acc = BigInt::zero();
        for (i, row) in self.rows.iter().enumerate() {
            if x[i].is_zero() {
                continue;
            }
            let gy: BigInt = row.iter().map(|&(j, g)| &y[j] * g).sum();
            acc += &x[i] * gy;
        }
        acc
    }

    /// Bilinear (not Hermitian) extension to complex vectors.
    pub fn pair_complex(
        &self,
        x: &ComplexVector,
        y: &ComplexVector,
    ) -> Result<QuadComplex, LatticeError> {
        let rr = self.pair(&x.re, &y.re)?;
        let ii = self.pair(&x.im, &y.im)?;
        let ri = self.pair(&x.re, &y.im)?;
        let ir = self.pair(&x.im, &y.re)?;
        Ok(QuadComplex::new(rr.try_sub(&ii)?, ri.try_add(&ir)?))
    }

    /// The linear functional `y -> x.y` as a row of (possibly irrational) scalars.
    pub fn functional(&self, x: &LatticeVector) -> Vec<QuadScalar> {
        (0..self.rank)
            .map(|j| {
                (0..self.rank)
                    .filter(|&i| self.gram[i][j] != 0)
                    .map(|i| x.coords[i].scale(&rat_int(self.gram[i][j])))
                    .sum()
            })
            .collect()
    }

    pub fn signature(&self) -> Signature {
        let g: Vec<Vec<Rational>> = self
            .gram
            .iter()
            .map(|row| row.iter().map(|&v| rat_int(v)).collect())
            .collect();
        signature(&g)
    }

    pub fn unit(&self, i: usize) -> LatticeVector {
        LatticeVector::unit(self.rank, i)
    }

    pub fn zero(&self) -> LatticeVector {
        LatticeVector::zero(self.rank)
    }
}

fn hyperbolic_block(gram: &mut [Vec<i64>], at: usize, off: i64) {
    gram[at][at + 1] = off;
    gram[at + 1][at] = off;
}

/// `3U + 2E8(-1) + U_Mukai`, with the Mukai block `[[0,-1],[-1,0]]` so that the
/// Gram pairing of `(r, D, s)` triples is `D1.D2 - r1 s2 - r2 s1`.
pub fn standard_mukai_lattice() -> GramLattice {
    let mut gram = vec![vec![0i64; RANK]; RANK];
    for at in [U1, U2, U3] {
        hyperbolic_block(&mut gram, at, 1);
    }
    for base in [E8_A, E8_B] {
        for k in 0..8 {
            gram[base + k][base + k] = -2;
        }
        for &(a, b) in &E8_EDGES {
            gram[base + a][base + b] = 1;
            gram[base + b][base + a] = 1;
        }
    }
    hyperbolic_block(&mut gram, R_SLOT, -1);
    let mut labels = Vec::with_capacity(RANK);
    for u in 1..=3 {
        labels.push(format!("U{u}.e1"));
        labels.push(format!("U{u}.e2"));
    }
    for e in 1..=2 {
        for k in 1..=8 {
            labels.push(format!("E8_{e}.a{k}"));
        }
    }
    labels.push("r".into());
    labels.push("s".into());
    GramLattice::new(gram, labels).expect("well-formed Mukai lattice")
}

static MUKAI: LazyLock<GramLattice> = LazyLock::new(standard_mukai_lattice);

pub fn mukai() -> &'static GramLattice {
    &MUKAI
}

/// The K3 lattice: the leading 22 coordinates of the Mukai lattice.
pub fn k3_lattice() -> GramLattice {
    let m = mukai();
    let gram = m.gram[..K3_RANK]
        .iter()
        .map(|row| row[..K3_RANK].to_vec())
        .collect();
    GramLattice::new(gram, m.labels[..K3_RANK].to_vec()).expect("k3 block")
}

/// Mukai vector `w = (0, 0, -1)`.
pub fn mukai_w() -> LatticeVector {
    let mut x = LatticeVector::zero(RANK);
    x.coords[S_SLOT] = QuadScalar::int(-1);
    x
}

/// Mukai vector `w* = (1, 0, 0)`.
pub fn mukai_wstar() -> LatticeVector {
    LatticeVector::unit(RANK, R_SLOT)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub plus: usize,
    pub zero: usize,
    pub minus: usize,
}

impl Signature {
    pub fn new(plus: usize, zero: usize, minus: usize) -> Self {
        Signature { plus, zero, minus }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.plus, self.zero, self.minus)
    }
}

/// Inertia of a symmetric rational matrix by congruence diagonalization.
pub fn signature(gram: &[Vec<Rational>]) -> Signature {
    let n = gram.len();
    let mut a: Vec<Vec<Rational>> = gram.to_vec();
    let mut sig = Signature::new(0, 0, 0);
    let mut active: Vec<usize> = (0..n).collect();
    while let Some(&first) = active.first() {
        let _ = first;
        let pivot = active.iter().copied().find(|&i| !a[i][i].is_zero());
        let pivot = match pivot {
            Some(p) => p,
            None => {
                // zero diagonal: find a_ij != 0 and replace row/col i by i + j
                let hit = active.iter().copied().find_map(|i| {
                    active
                        .iter()
                        .copied()
                        .find(|&j| j != i && !a[i][j].is_zero())
                        .map(|j| (i, j))
                });
                let Some((i, j)) = hit else {
                    sig.zero += active.len();
                    break;
                };
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        let d = a[pivot][pivot].clone();
        if d.is_positive() {
            sig.plus += 1;
        } else {
            sig.minus += 1;
        }
        active.retain(|&i| i != pivot);
        for &i in &active {
            if a[i][pivot].is_zero() {
                continue;
            }
            let factor = &a[i][pivot] / &d;
            for &k in &active {
                let v = &factor * &a[pivot][k];
                a[i][k] -= v;
            }
        }
        for &i in &active {
            a[i][pivot] = Rational::zero();
            a[pivot][i] = Rational::zero();
        }
    }
    sig
}

/// A real vector with exact scalar coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector {
    pub coords: Vec<QuadScalar>,
}

impl LatticeVector {
    pub fn new(coords: Vec<QuadScalar>) -> Self {
        LatticeVector { coords }
    }

    pub fn zero(n: usize) -> Self {
        LatticeVector::new(vec![QuadScalar::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.coords[i] = QuadScalar::one();
        v
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        LatticeVector::new(xs.iter().map(|&x| QuadScalar::int(x)).collect())
    }

    pub fn from_bigints(xs: &[BigInt]) -> Self {
        LatticeVector::new(xs.iter().map(QuadScalar::from).collect())
    }

    /// Embeds a short coordinate list at the front of a rank-`n` vector.
    pub fn padded(xs: &[i64], n: usize) -> Self {
        let mut v = Self::zero(n);
        for (slot, &x) in v.coords.iter_mut().zip(xs) {
            *slot = QuadScalar::int(x);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(QuadScalar::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(QuadScalar::is_integer)
    }

    pub fn is_rational(&self) -> bool {
        self.coords.iter().all(QuadScalar::is_rational)
    }

    pub fn to_integers(&self) -> Result<Vec<BigInt>, LatticeError> {
        self.coords
            .iter()
            .map(|c| c.to_integer().ok_or(LatticeError::NotIntegral))
            .collect()
    }

    /// Common field tag of the coordinates, 0 when all are rational.
    pub fn field(&self) -> u64 {
        self.coords.iter().map(QuadScalar::field).max().unwrap_or(0)
    }

    pub fn scale(&self, k: &QuadScalar) -> Self {
        LatticeVector::new(self.coords.iter().map(|c| c * k).collect())
    }

    pub fn scale_rational(&self, k: &Rational) -> Self {
        LatticeVector::new(self.coords.iter().map(|c| c.scale(k)).collect())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, LatticeError> {
        if self.len() != other.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<_, _>>()?;
        Ok(LatticeVector::new(coords))
    }

    /// `self + k * other`.
    pub fn axpy(&self, k: &QuadScalar, other: &Self) -> Self {
        self + &other.scale(k)
    }

    /// Rational and irrational parts, both as rational vectors, plus the field tag.
    pub fn split_parts(&self) -> (Vec<Rational>, Vec<Rational>, u64) {
        let re = self.coords.iter().map(|c| c.rational_part().clone()).collect();
        let ir = self.coords.iter().map(|c| c.irrational_part().clone()).collect();
        (re, ir, self.field())
    }

    /// Truncates or pads with zeros to length `n`.
    pub fn resized(&self, n: usize) -> Self {
        let mut coords = self.coords.clone();
        coords.resize(n, QuadScalar::zero());
        LatticeVector::new(coords)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(QuadScalar::to_f64).collect()
    }
}

impl Add<&LatticeVector> for &LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: &LatticeVector) -> LatticeVector {
        match self.try_add(rhs) {
            Ok(v) => v,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Sub<&LatticeVector> for &LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: &LatticeVector) -> LatticeVector {
        self + &(-rhs)
    }
}

impl Neg for &LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        LatticeVector::new(self.coords.iter().map(|c| -c).collect())
    }
}

impl Add for LatticeVector {
    type Output = LatticeVector;
    fn add(self, rhs: LatticeVector) -> LatticeVector {
        &self + &rhs
    }
}

impl Sub for LatticeVector {
    type Output = LatticeVector;
    fn sub(self, rhs: LatticeVector) -> LatticeVector {
        &self - &rhs
    }
}

impl Neg for LatticeVector {
    type Output = LatticeVector;
    fn neg(self) -> LatticeVector {
        -&self
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

/// `re + i*im` with real lattice vectors as parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ComplexVector {
    pub re: LatticeVector,
    pub im: LatticeVector,
}

impl ComplexVector {
    pub fn new(re: LatticeVector, im: LatticeVector) -> Self {
        assert_eq!(re.len(), im.len());
        ComplexVector { re, im }
    }

    pub fn real(re: LatticeVector) -> Self {
        let n = re.len();
        ComplexVector::new(re, LatticeVector::zero(n))
    }

    pub fn imaginary(im: LatticeVector) -> Self {
        let n = im.len();
        ComplexVector::new(LatticeVector::zero(n), im)
    }

    pub fn len(&self) -> usize {
        self.re.len()
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }

    pub fn conj(&self) -> Self {
        ComplexVector::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, k: &QuadComplex) -> Self {
        ComplexVector::new(
            &self.re.scale(&k.re) - &self.im.scale(&k.im),
            &self.re.scale(&k.im) + &self.im.scale(&k.re),
        )
    }

    pub fn scale_real(&self, k: &QuadScalar) -> Self {
        ComplexVector::new(self.re.scale(k), self.im.scale(k))
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Add<&ComplexVector> for &ComplexVector {
    type Output = ComplexVector;
    fn add(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&ComplexVector> for &ComplexVector {
    type Output = ComplexVector;
    fn sub(self, rhs: &ComplexVector) -> ComplexVector {
        ComplexVector::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

/// The span of an integral basis inside an ambient Gram lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sublattice {
    pub ambient: GramLattice,
    pub basis: Vec<Vec<BigInt>>,
}

impl Sublattice {
    pub fn new(ambient: GramLattice, basis: Vec<Vec<BigInt>>) -> Result<Self, LatticeError> {
        for b in &basis {
            ambient.check(b.len())?;
        }
        let rows: Vec<Vec<Rational>> = basis
            .iter()
            .map(|b| b.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        if rational_rank(&rows) != basis.len() {
            return Err(LatticeError::Dependent);
        }
        Ok(Sublattice { ambient, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn vector(&self, k: usize) -> LatticeVector {
        LatticeVector::from_bigints(&self.basis[k])
    }

    pub fn vectors(&self) -> Vec<LatticeVector> {
        (0..self.rank()).map(|k| self.vector(k)).collect()
    }

    pub fn gram(&self) -> Vec<Vec<BigInt>> {
        let n = self.rank();
        let mut g = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = self.ambient.pair_int(&self.basis[i], &self.basis[j]);
                g[i][j] = v.clone();
                g[j][i] = v;
            }
        }
        g
    }

    pub fn signature(&self) -> Signature {
        let g: Vec<Vec<Rational>> = self
            .gram()
            .into_iter()
            .map(|row| row.into_iter().map(Rational::from_integer).collect())
            .collect();
        signature(&g)
    }

    /// Ambient coordinates of `sum coeffs[k] * basis[k]`.
    pub fn combine(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(coeffs.len(), self.rank());
        let mut out = vec![BigInt::zero(); self.ambient.rank];
        for (c, b) in coeffs.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(b) {
                *o += c * x;
            }
        }
        out
    }

    /// Coefficients of `x` in the basis when `x` lies in the rational span.
    pub fn coefficients(&self, x: &LatticeVector) -> Option<Vec<Rational>> {
        if !x.is_rational() || x.len() != self.ambient.rank {
            return None;
        }
        let cols: Vec<Vec<Rational>> = (0..self.ambient.rank)
            .map(|i| {
                self.basis
                    .iter()
                    .map(|b| Rational::from_integer(b[i].clone()))
                    .collect()
            })
            .collect();
        let rhs: Vec<Rational> = x.coords.iter().map(|c| c.rational_part().clone()).collect();
        rational_solve(&cols, &rhs)
    }

    /// Whether `x` is an integral combination of the basis.
    pub fn contains(&self, x: &LatticeVector) -> bool {
        self.coefficients(x)
            .is_some_and(|c| c.iter().all(|v| v.is_integer()))
    }
}

/// Integral basis of the vectors of `lattice` orthogonal to every functional
/// row. Rows may carry irrational entries; each is split into its rational and
/// `sqrt(m)` parts before the integer kernel is taken.
pub fn annihilator(lattice: &GramLattice, functionals: &[Vec<QuadScalar>]) -> Sublattice {
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for f in functionals {
        assert_eq!(f.len(), lattice.rank);
        rows.push(f.iter().map(|c| c.rational_part().clone()).collect());
        if f.iter().any(|c| !c.is_rational()) {
            rows.push(f.iter().map(|c| c.irrational_part().clone()).collect());
        }
    }
    let int_rows = split_rows(&rows);
    let basis = integer_kernel(&int_rows, lattice.rank);
    Sublattice {
        ambient: lattice.clone(),
        basis,
    }
}

/// Saturated integral basis of `{x in L : x.g = 0 for all g}`.
pub fn orth_complement(
    lattice: &GramLattice,
    gens: &[LatticeVector],
) -> Result<Sublattice, LatticeError> {
    for g in gens {
        lattice.check(g.len())?;
        if !g.is_integral() {
            return Err(LatticeError::NotIntegral);
        }
    }
    Ok(orth_complement_real(lattice, gens))
}

/// As [`orth_complement`] but for real generators with exact coordinates.
pub fn orth_complement_real(lattice: &GramLattice, gens: &[LatticeVector]) -> Sublattice {
    let functionals: Vec<Vec<QuadScalar>> = gens.iter().map(|g| lattice.functional(g)).collect();
    annihilator(lattice, &functionals)
}

/// Orthogonal complement inside the K3 block of the Mukai lattice.
pub fn k3_complement(gens: &[LatticeVector]) -> Sublattice {
    let mut all = gens.to_vec();
    all.push(mukai_w());
    all.push(mukai_wstar());
    orth_complement_real(mukai(), &all)
}

/// `x - (x.vstar) v - (x.v) vstar` for a hyperbolic pair `v, vstar`.
pub fn project_off_hyperbolic(
    lattice: &GramLattice,
    v: &LatticeVector,
    vstar: &LatticeVector,
    x: &LatticeVector,
) -> Result<LatticeVector, LatticeError> {
    let a = lattice.pair(x, vstar)?;
    let b = lattice.pair(x, v)?;
    Ok(&(x - &v.scale(&a)) - &vstar.scale(&b))
}

/// Least positive integer multiple of a rational vector that is integral.
pub fn clear_denominators(x: &[Rational]) -> Vec<BigInt> {
    let d = common_denominator(x.iter());
    x.iter().map(|c| (c * Rational::from_integer(d.clone())).to_integer()).collect()
}

pub(crate) fn gcd_normalize(x: &mut [BigInt]) {
    use num_integer::Integer;
    let g = x.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in x.iter_mut() {
            *v /= &g;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> LatticeVector {
        LatticeVector::unit(RANK, U1)
    }

    fn sigma0() -> LatticeVector {
        &LatticeVector::unit(RANK, U1 + 1) - &f()
    }

    #[test]
    fn blocks_pair_as_expected() {
        let l = mukai();
        assert!(l.is_even());
        assert_eq!(l.pair(&l.unit(U1), &l.unit(U1 + 1)).unwrap(), QuadScalar::one());
        assert_eq!(l.pair(&mukai_w(), &mukai_wstar()).unwrap(), QuadScalar::one());
        assert_eq!(l.pair(&l.unit(E8_A), &l.unit(E8_A)).unwrap(), QuadScalar::int(-2));
        assert_eq!(l.pair(&f(), &sigma0()).unwrap(), QuadScalar::one());
        assert_eq!(l.pair(&sigma0(), &sigma0()).unwrap(), QuadScalar::int(-2));
        assert_eq!(l.pair(&f(), &l.zero()).unwrap(), QuadScalar::zero());
    }

    #[test]
    fn e8_block_is_unimodular() {
        let g: Vec<Vec<Rational>> = (0..8)
            .map(|i| (0..8).map(|j| rat_int(mukai().gram[E8_A + i][E8_A + j])).collect())
            .collect();
        assert!(rational_inverse(&g).is_some_and(|inv| inv
            .iter()
            .flatten()
            .all(|x| x.is_integer())));
    }

    #[test]
    fn signatures() {
        assert_eq!(k3_lattice().signature(), Signature::new(3, 0, 19));
        assert_eq!(mukai().signature(), Signature::new(4, 0, 20));
        let hyperbolic = GramLattice::from_gram(vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(hyperbolic.signature(), Signature::new(1, 0, 1));
        let degenerate = GramLattice::from_gram(vec![vec![0, 0], vec![0, -2]]);
        assert_eq!(degenerate.signature(), Signature::new(0, 1, 1));
    }

    #[test]
    fn complement_of_fibration_plane() {
        let c = k3_complement(&[f(), sigma0()]);
        assert_eq!(c.rank(), 20);
        assert_eq!(c.signature(), Signature::new(2, 0, 18));
        for b in c.vectors() {
            assert!(mukai().pair(&b, &f()).unwrap().is_zero());
            assert!(mukai().pair(&b, &sigma0()).unwrap().is_zero());
        }
    }

    #[test]
    fn complement_of_everything_is_zero() {
        let all: Vec<_> = (0..RANK).map(|i| mukai().unit(i)).collect();
        assert_eq!(orth_complement(mukai(), &all).unwrap().rank(), 0);
    }

    #[test]
    fn complement_is_saturated() {
        // x.(2,0) = 0 in U forces the first coordinate of the partner to vanish
        let u = GramLattice::from_gram(vec![vec![0, 1], vec![1, 0]]);
        let c = orth_complement(&u, &[LatticeVector::from_ints(&[2, 0])]).unwrap();
        assert_eq!(c.rank(), 1);
        assert!(c.contains(&LatticeVector::from_ints(&[1, 0])));
    }

    #[test]
    fn projection_kills_fibration_part() {
        let v = f();
        let vs = &f() + &sigma0();
        let root = mukai().unit(E8_A + 3);
        let x = &(&f().scale(&QuadScalar::int(2)) + &sigma0()) + &root;
        assert_eq!(project_off_hyperbolic(mukai(), &v, &vs, &x).unwrap(), root);
        assert!(project_off_hyperbolic(mukai(), &v, &vs, &f()).unwrap().is_zero());
    }
}
