//! Mukai vectors, the stability point `exp(B + i omega)`, central charges,
//! (-2)-class falsifiers and generalized walls on the mirror K3.
//!
//! A Mukai vector `(r, D, s)` sits in Mukai coordinates with `r` at index 22
//! and `s` at index 23, so the lattice pairing is `D1.D2 - r1 s2 - r2 s1`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attractor::{in_k3_block, lift, Charge};
use crate::exact::{rat, ArithError, QuadComplex, QuadScalar, Rational};
use crate::lattice::{
    box_search, fincke_pohst, integer_kernel, k3_complement, lll_reduce, mukai, rational_solve,
    signature, split_rows, BoxConstraint, ComplexVector, LatticeError, LatticeVector, Signature,
    Sublattice, K3_RANK, RANK, R_SLOT, S_SLOT,
};
use crate::mirror::{mirror_class, SplitData};
use crate::scenario::{Scenario, ScenarioError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilityError {
    #[error("omega^2 must be positive")]
    NotPositive,
    #[error("central charge expansion mismatch: pairing gave {pairing}, expansion gave {expanded}")]
    ExpansionMismatch { pairing: String, expanded: String },
    #[error("Z(mu(l_{index})) = {value} is not real")]
    RealityViolation { index: usize, value: String },
    #[error("no candidate succeeded after {tried} tries")]
    SearchExhausted {
        tried: usize,
        best: Option<Box<CandidateOutcome>>,
    },
    #[error("wall ({i}, {j}) does not contain the stability point")]
    WallFailure { i: usize, j: usize },
    #[error("(-2)-class {delta} annihilates the stability point")]
    Obstructed { delta: MukaiVector },
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error(transparent)]
    Scenario(Box<ScenarioError>),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

impl From<ScenarioError> for StabilityError {
    fn from(e: ScenarioError) -> Self {
        StabilityError::Scenario(Box::new(e))
    }
}

fn pair(x: &LatticeVector, y: &LatticeVector) -> QuadScalar {
    mukai().pair(x, y).expect("vectors live in the Mukai lattice")
}

/// An integral Mukai vector `(r, D, s)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "MukaiRepr", try_from = "MukaiRepr")]
pub struct MukaiVector {
    coords: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
struct MukaiRepr {
    r: QuadScalar,
    #[serde(rename = "D")]
    d: Vec<QuadScalar>,
    s: QuadScalar,
}

impl From<MukaiVector> for MukaiRepr {
    fn from(v: MukaiVector) -> Self {
        MukaiRepr {
            r: v.r().into(),
            d: v.coords[..K3_RANK].iter().map(QuadScalar::from).collect(),
            s: v.s().into(),
        }
    }
}

impl TryFrom<MukaiRepr> for MukaiVector {
    type Error = LatticeError;
    fn try_from(m: MukaiRepr) -> Result<Self, LatticeError> {
        if m.d.len() != K3_RANK {
            return Err(LatticeError::DimensionMismatch {
                expected: K3_RANK,
                got: m.d.len(),
            });
        }
        let mut coords = m.d;
        coords.push(m.r);
        coords.push(m.s);
        MukaiVector::from_lattice(&LatticeVector::new(coords))
    }
}

impl MukaiVector {
    pub fn from_lattice(v: &LatticeVector) -> Result<Self, LatticeError> {
        if v.len() != RANK {
            return Err(LatticeError::DimensionMismatch {
                expected: RANK,
                got: v.len(),
            });
        }
        Ok(MukaiVector {
            coords: v.to_integers()?,
        })
    }

    /// `d` lists leading K3 coordinates; the rest are zero.
    pub fn from_parts(r: i64, d: &[i64], s: i64) -> Self {
        assert!(d.len() <= K3_RANK);
        let mut coords = vec![BigInt::zero(); RANK];
        for (c, x) in coords.iter_mut().zip(d) {
            *c = BigInt::from(*x);
        }
        coords[R_SLOT] = BigInt::from(r);
        coords[S_SLOT] = BigInt::from(s);
        MukaiVector { coords }
    }

    /// `(r, D, s)` with `D` given as a K3-lattice vector.
    pub fn from_class(r: i64, d: &LatticeVector, s: i64) -> Result<Self, LatticeError> {
        let mut v = lift(d)?;
        v.coords[R_SLOT] = QuadScalar::int(r);
        v.coords[S_SLOT] = QuadScalar::int(s);
        Self::from_lattice(&v)
    }

    pub fn r(&self) -> &BigInt {
        &self.coords[R_SLOT]
    }

    pub fn s(&self) -> &BigInt {
        &self.coords[S_SLOT]
    }

    /// `D` as a Mukai-coordinate vector with vanishing `r, s`.
    pub fn d(&self) -> LatticeVector {
        let mut c = self.coords.clone();
        c[R_SLOT] = BigInt::zero();
        c[S_SLOT] = BigInt::zero();
        LatticeVector::from_bigints(&c)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn lattice_vector(&self) -> LatticeVector {
        LatticeVector::from_bigints(&self.coords)
    }

    pub fn neg(&self) -> Self {
        MukaiVector {
            coords: self.coords.iter().map(|x| -x).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        MukaiVector {
            coords: self.coords.iter().zip(&other.coords).map(|(x, y)| x + y).collect(),
        }
    }
}

impl fmt::Display for MukaiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.coords[..K3_RANK].iter().map(ToString::to_string).collect();
        write!(f, "({}, [{}], {})", self.r(), d.join(", "), self.s())
    }
}

/// `D1.D2 - r1 s2 - r2 s1`.
pub fn mukai_pair(u: &MukaiVector, v: &MukaiVector) -> BigInt {
    mukai().pair_int(&u.coords, &v.coords)
}

/// `exp(B + i omega) = (1, B + i omega, (B + i omega)^2 / 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityPoint {
    pub b_field: LatticeVector,
    pub omega: LatticeVector,
    pub psi: ComplexVector,
}

pub fn exp_point(b: &LatticeVector, omega: &LatticeVector) -> Result<StabilityPoint, StabilityError> {
    let (b, omega) = (lift(b)?, lift(omega)?);
    if !in_k3_block(&b) || !in_k3_block(&omega) {
        return Err(StabilityError::PreconditionViolation(
            "B and omega must lie in the K3 lattice".into(),
        ));
    }
    let w2 = mukai().pair(&omega, &omega)?;
    if !w2.is_positive() {
        return Err(StabilityError::NotPositive);
    }
    let b2 = mukai().pair(&b, &b)?;
    let bw = mukai().pair(&b, &omega)?;
    let mut re = b.clone();
    re.coords[R_SLOT] = QuadScalar::one();
    re.coords[S_SLOT] = (b2.try_sub(&w2)?).scale(&rat(1, 2));
    let mut im = omega.clone();
    im.coords[S_SLOT] = bw;
    Ok(StabilityPoint {
        b_field: b,
        omega,
        psi: ComplexVector::new(re, im),
    })
}

impl StabilityPoint {
    /// `(Psi, x)` for an arbitrary Mukai-coordinate vector.
    pub fn pair_with(&self, x: &LatticeVector) -> Result<QuadComplex, StabilityError> {
        Ok(mukai().pair_complex(&self.psi, &ComplexVector::real(x.clone()))?)
    }
}

/// `Z(v) = (Psi, v)`, checked against the expansion
/// `D.B - s - r (B^2 - omega^2)/2 + i (D.omega - r B.omega)`.
pub fn central_charge(psi: &StabilityPoint, v: &MukaiVector) -> Result<QuadComplex, StabilityError> {
    let z = psi.pair_with(&v.lattice_vector())?;
    let d = v.d();
    let (b, w) = (&psi.b_field, &psi.omega);
    let r = QuadScalar::from(v.r());
    let s = QuadScalar::from(v.s());
    let db = mukai().pair(&d, b)?;
    let dw = mukai().pair(&d, w)?;
    let expanded = if r.is_zero() {
        QuadComplex::new(db.try_sub(&s)?, dw)
    } else {
        let b2 = mukai().pair(b, b)?;
        let w2 = mukai().pair(w, w)?;
        let bw = mukai().pair(b, w)?;
        let half_r = r.scale(&rat(1, 2));
        let re = db.try_sub(&s)?.try_sub(&half_r.try_mul(&b2.try_sub(&w2)?)?)?;
        let im = dw.try_sub(&r.try_mul(&bw)?)?;
        QuadComplex::new(re, im)
    };
    if expanded != z {
        return Err(StabilityError::ExpansionMismatch {
            pairing: z.to_string(),
            expanded: expanded.to_string(),
        });
    }
    Ok(z)
}

fn gram2(x: &LatticeVector, y: &LatticeVector) -> [[QuadScalar; 2]; 2] {
    let xy = pair(x, y);
    [[pair(x, x), xy.clone()], [xy, pair(y, y)]]
}

fn positive_definite_2x2(g: &[[QuadScalar; 2]; 2]) -> bool {
    g[0][0].is_positive() && (&g[0][0] * &g[1][1] - g[0][1].pow2()).is_positive()
}

/// Gram matrix of `(Re Psi, Im Psi)`.
pub fn plane_gram(psi: &StabilityPoint) -> [[QuadScalar; 2]; 2] {
    gram2(&psi.psi.re, &psi.psi.im)
}

pub fn is_positive_plane(psi: &StabilityPoint) -> bool {
    positive_definite_2x2(&plane_gram(psi))
}

/// Integral classes of the K3 lattice orthogonal to both parts of a period.
pub fn ns_of_mirror(period: &ComplexVector) -> Sublattice {
    k3_complement(&[period.re.clone(), period.im.clone()])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FalsifierMethod {
    /// `Psi`-orthogonal classes form a negative definite lattice, so the
    /// (-2)-classes in it were listed completely.
    DefiniteKernel,
    /// Coefficient-box backtracking only.
    BoxBacktrack,
}

/// Outcome of the bounded search for a (-2)-class `delta` with `(Psi, delta) = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FalsifierReport {
    pub bound: u32,
    pub method: FalsifierMethod,
    /// First hit inside the box `|r|, |s|, |coefficients| <= bound`.
    pub hit: Option<MukaiVector>,
    pub box_hits: Vec<MukaiVector>,
    /// Every hit with no bound at all, when the kernel is definite.
    pub complete_hits: Option<Vec<MukaiVector>>,
}

impl FalsifierReport {
    pub fn first_complete_hit(&self) -> Option<&MukaiVector> {
        self.complete_hits.as_ref().and_then(|h| h.first())
    }

    /// No hit in the box, and none at all when the search was complete.
    pub fn is_clean(&self) -> bool {
        self.hit.is_none() && self.complete_hits.as_ref().is_none_or(Vec::is_empty)
    }
}

/// The Mukai sublattice `Z w* + ns + Z w` with coordinates `(r, ns..., s)`.
fn extended_sublattice(ns: &Sublattice) -> Sublattice {
    let mut basis = Vec::with_capacity(ns.rank() + 2);
    let mut r = vec![BigInt::zero(); RANK];
    r[R_SLOT] = BigInt::one();
    basis.push(r);
    for b in &ns.basis {
        let mut v = b.clone();
        v.resize(RANK, BigInt::zero());
        basis.push(v);
    }
    let mut s = vec![BigInt::zero(); RANK];
    s[S_SLOT] = BigInt::one();
    basis.push(s);
    Sublattice::new(mukai().clone(), basis).expect("ns lies in the K3 block")
}

fn in_box(y: &[BigInt], bound: u32) -> bool {
    let b = BigInt::from(bound);
    y.iter().all(|c| c.abs() <= b)
}

/// Looks for `delta = (r, D, s)` with `D` in `ns`, `delta^2 = -2` and
/// `(Psi, delta) = 0`. When the `Psi`-orthogonal part of the extended lattice
/// is negative definite its (-2)-classes are listed completely by
/// Fincke-Pohst; otherwise only the coefficient box is searched.
pub fn p0_falsifier(
    psi: &StabilityPoint,
    ns: &Sublattice,
    bound: u32,
) -> Result<FalsifierReport, StabilityError> {
    let ext = extended_sublattice(ns);
    let n = ext.rank();
    let mut rows: Vec<Vec<Rational>> = (0..4).map(|_| Vec::with_capacity(n)).collect();
    for b in ext.vectors() {
        let z = psi.pair_with(&b)?;
        rows[0].push(z.re.rational_part().clone());
        rows[1].push(z.re.irrational_part().clone());
        rows[2].push(z.im.rational_part().clone());
        rows[3].push(z.im.irrational_part().clone());
    }
    let rows = split_rows(&rows);
    let gram = ext.gram();
    let kernel = integer_kernel(&rows, n);
    let k = kernel.len();
    let gk: Vec<Vec<BigInt>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for (a, ka) in kernel[i].iter().enumerate() {
                        if ka.is_zero() {
                            continue;
                        }
                        for (b, kb) in kernel[j].iter().enumerate() {
                            acc += ka * &gram[a][b] * kb;
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let to_rat = |g: &[Vec<BigInt>]| -> Vec<Vec<Rational>> {
        g.iter()
            .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect()
    };
    let definite = signature(&to_rat(&gk)) == Signature::new(0, 0, k);
    let to_mukai = |y: &[BigInt]| {
        MukaiVector::from_lattice(&LatticeVector::from_bigints(&ext.combine(y)))
            .expect("integral combination")
    };
    if definite {
        let neg: Vec<Vec<BigInt>> = gk.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        let (h, reduced) = lll_reduce(&neg);
        let two = Rational::from_integer(BigInt::from(2));
        let mut ys: Vec<Vec<BigInt>> = fincke_pohst(&reduced, &two)
            .into_iter()
            .filter(|x| {
                let mut q = BigInt::zero();
                for (i, xi) in x.iter().enumerate() {
                    for (j, xj) in x.iter().enumerate() {
                        q += xi * &reduced[i][j] * xj;
                    }
                }
                q == BigInt::from(2)
            })
            .map(|x| {
                // reduced coordinates -> kernel coordinates -> (r, ns, s)
                let mut kc = vec![BigInt::zero(); k];
                for (xi, row) in x.iter().zip(&h) {
                    for (c, hij) in kc.iter_mut().zip(row) {
                        *c += xi * hij;
                    }
                }
                let mut y = vec![BigInt::zero(); n];
                for (c, kv) in kc.iter().zip(&kernel) {
                    for (yi, kvi) in y.iter_mut().zip(kv) {
                        *yi += c * kvi;
                    }
                }
                y
            })
            .collect();
        ys.sort();
        let box_hits: Vec<MukaiVector> = ys
            .iter()
            .filter(|y| in_box(y, bound))
            .map(|y| to_mukai(y))
            .collect();
        let complete: Vec<MukaiVector> = ys.iter().map(|y| to_mukai(y)).collect();
        Ok(FalsifierReport {
            bound,
            method: FalsifierMethod::DefiniteKernel,
            hit: box_hits.first().cloned(),
            box_hits,
            complete_hits: Some(complete),
        })
    } else {
        let cons = BoxConstraint { rows };
        let box_hits: Vec<MukaiVector> = box_search(&gram, &cons, -2, bound)
            .iter()
            .map(|y| to_mukai(y))
            .collect();
        Ok(FalsifierReport {
            bound,
            method: FalsifierMethod::BoxBacktrack,
            hit: box_hits.first().cloned(),
            box_hits,
            complete_hits: None,
        })
    }
}

/// Result of testing `m - n + D n / (2 p^2) = 0` over the solutions of
/// `n (m - n) = -1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Type4Outcome {
    Certificate {
        discriminant: QuadScalar,
        two_p_sq: QuadScalar,
        checked: Vec<(i64, i64)>,
    },
    Counterexample {
        m: i64,
        n: i64,
        delta: MukaiVector,
    },
}

impl Type4Outcome {
    pub fn is_certificate(&self) -> bool {
        matches!(self, Type4Outcome::Certificate { .. })
    }
}

pub fn type4_certificate(ch: &Charge, split: &SplitData) -> Result<Type4Outcome, StabilityError> {
    for x in [&split.f, &split.sigma0] {
        if !pair(x, &ch.p).is_zero() || !pair(x, &ch.q).is_zero() {
            return Err(StabilityError::PreconditionViolation(
                "f and sigma0 must be orthogonal to p and q".into(),
            ));
        }
    }
    let d = Rational::from_integer(ch.discriminant());
    let p2 = ch
        .p_sq()
        .as_rational()
        .cloned()
        .ok_or_else(|| StabilityError::PreconditionViolation("p must be integral".into()))?;
    let ratio = &d / (&p2 * rat(2, 1));
    let mut checked = Vec::new();
    for n in [1i64, -1] {
        // n (m - n) = -1
        let m = n - 1 / n;
        let lhs = rat(m - n, 1) + &ratio * rat(n, 1);
        if lhs.is_zero() {
            let dvec = &split.f.scale(&QuadScalar::int(m)) + &split.sigma0.scale(&QuadScalar::int(n));
            let delta = MukaiVector::from_class(0, &dvec, 0)?;
            return Ok(Type4Outcome::Counterexample { m, n, delta });
        }
        checked.push((m, n));
    }
    Ok(Type4Outcome::Certificate {
        discriminant: ch.discriminant().into(),
        two_p_sq: (&p2 * rat(2, 1)).into(),
        checked,
    })
}

/// Membership of the stability point in the generalized wall of `(v_i, v_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallReport {
    pub pair: (usize, usize),
    pub member: bool,
    pub z1: QuadComplex,
    pub z2: QuadComplex,
    pub kind: String,
}

/// `Z1 / Z2` is a positive real number.
pub fn positive_ratio(z1: &QuadComplex, z2: &QuadComplex) -> bool {
    if z1.is_zero() || z2.is_zero() {
        return false;
    }
    let cross = &z1.re * &z2.im - &z1.im * &z2.re;
    let dot = &z1.re * &z2.re + &z1.im * &z2.im;
    cross.is_zero() && dot.is_positive()
}

pub fn wall_member(
    psi: &StabilityPoint,
    v1: &MukaiVector,
    v2: &MukaiVector,
) -> Result<WallReport, StabilityError> {
    let z1 = central_charge(psi, v1)?;
    let z2 = central_charge(psi, v2)?;
    Ok(WallReport {
        pair: (0, 1),
        member: positive_ratio(&z1, &z2),
        z1,
        z2,
        kind: "generalized".into(),
    })
}

/// `l`, `mu(l)` and `Z(mu(l))` for one Picard basis class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCharge {
    pub class: LatticeVector,
    pub mukai: MukaiVector,
    pub z: QuadComplex,
}

pub fn class_charges(scenario: &Scenario) -> Result<Vec<ClassCharge>, StabilityError> {
    scenario
        .pic_basis
        .iter()
        .map(|l| {
            let mu = mirror_class(&scenario.split, l).map_err(ScenarioError::from)?;
            let z = central_charge(&scenario.psi, &mu)?;
            Ok(ClassCharge {
                class: l.clone(),
                mukai: mu,
                z,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealityReport {
    pub charges: Vec<ClassCharge>,
}

/// Every `Z(mu(l))` over the Picard basis has vanishing imaginary part.
pub fn verify_reality(scenario: &Scenario) -> Result<RealityReport, StabilityError> {
    let charges = class_charges(scenario)?;
    if let Some((index, c)) = charges.iter().enumerate().find(|(_, c)| !c.z.is_real()) {
        return Err(StabilityError::RealityViolation {
            index,
            value: c.z.to_string(),
        });
    }
    Ok(RealityReport { charges })
}

/// Candidate `t` of the Kähler search is
/// `beta omega_ref + sum alpha_k n_k + (t mod S) c_step sigma0 + c' / 2^(t div S) eta`
/// with `S = steps_per_scale` and `n_k` the Picard basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub omega_ref: LatticeVector,
    pub eta: LatticeVector,
    pub c_step: QuadScalar,
    pub c_prime: QuadScalar,
    pub alphas: Vec<QuadScalar>,
    pub beta: QuadScalar,
    pub bound: u32,
    pub max_iter: usize,
    pub steps_per_scale: usize,
    /// Also reject candidates with a (-2)-class outside the box.
    pub require_complete: bool,
}

impl SearchParams {
    /// `omega_ref = 2f + sigma0`, the default direction `eta` and
    /// `c' = sqrt(2)/10`.
    pub fn defaults(scenario: &Scenario) -> Result<Self, StabilityError> {
        let split = &scenario.split;
        Ok(SearchParams {
            omega_ref: &split.f.scale(&QuadScalar::int(2)) + &split.sigma0,
            eta: default_eta(&scenario.charge, split)?,
            c_step: QuadScalar::frac(1, 1001),
            c_prime: QuadScalar::new(rat(0, 1), rat(1, 10), 2)?,
            alphas: Vec::new(),
            beta: QuadScalar::one(),
            bound: 3,
            max_iter: 64,
            steps_per_scale: 4,
            require_complete: true,
        })
    }

    fn validate(&self) -> Result<(), StabilityError> {
        let bad = |why: &str| Err(StabilityError::PreconditionViolation(why.into()));
        if !self.beta.is_positive() {
            return bad("beta must be positive");
        }
        if self.bound < 1 {
            return bad("bound must be at least 1");
        }
        if self.steps_per_scale == 0 {
            return bad("steps_per_scale must be positive");
        }
        Ok(())
    }

    pub fn candidate(&self, t: usize, pic: &[LatticeVector], sigma0: &LatticeVector) -> LatticeVector {
        let mut w = self.omega_ref.scale(&self.beta);
        for (a, n) in self.alphas.iter().zip(pic) {
            w = w.axpy(a, n);
        }
        let step = QuadScalar::from(BigInt::from(t % self.steps_per_scale));
        w = w.axpy(&(&step * &self.c_step), sigma0);
        let halvings = (t / self.steps_per_scale) as u32;
        let shrink = Rational::new(BigInt::one(), BigInt::from(2).pow(halvings));
        w.axpy(&self.c_prime.scale(&shrink), &self.eta)
    }
}

/// Roots of a negative definite sublattice, as ambient vectors.
fn roots_of(sub: &Sublattice) -> Vec<LatticeVector> {
    let neg: Vec<Vec<BigInt>> = sub.gram().iter().map(|r| r.iter().map(|x| -x).collect()).collect();
    let (h, reduced) = lll_reduce(&neg);
    fincke_pohst(&reduced, &rat(2, 1))
        .into_iter()
        .map(|x| {
            let mut c = vec![BigInt::zero(); sub.rank()];
            for (xi, row) in x.iter().zip(&h) {
                for (ci, hij) in c.iter_mut().zip(row) {
                    *ci += xi * hij;
                }
            }
            LatticeVector::from_bigints(&sub.combine(&c))
        })
        .collect()
}

/// An integral `eta` in `<p, q, f, sigma0>^perp` with `eta . n_k = d k` for the
/// basis `n_1..n_18` (some `d > 0`), shifted until no root is orthogonal to it.
pub fn default_eta(ch: &Charge, split: &SplitData) -> Result<LatticeVector, StabilityError> {
    let l18 = k3_complement(&[ch.p.clone(), ch.q.clone(), split.f.clone(), split.sigma0.clone()]);
    let g: Vec<Vec<Rational>> = l18
        .gram()
        .into_iter()
        .map(|r| r.into_iter().map(Rational::from_integer).collect())
        .collect();
    let k = l18.rank();
    if signature(&g) != Signature::new(0, 0, k) {
        return Err(StabilityError::PreconditionViolation(
            "<p, q, f, sigma0>^perp must be negative definite".into(),
        ));
    }
    let roots = roots_of(&l18);
    for shift in 0..64i64 {
        let targets: Vec<Rational> = (1..=k as i64).map(|j| rat(j + shift * j * j, 1)).collect();
        let x = rational_solve(&g, &targets).expect("definite Gram is invertible");
        let coeffs = crate::lattice::clear_denominators(&x);
        let eta = LatticeVector::from_bigints(&l18.combine(&coeffs));
        if roots.iter().all(|r| !pair(r, &eta).is_zero()) {
            return Ok(eta);
        }
    }
    Err(StabilityError::PreconditionViolation("no regular eta found".into()))
}

/// What happened to one candidate of the search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateOutcome {
    pub index: usize,
    pub omega_j: LatticeVector,
    pub failures: Vec<String>,
    pub zero_real_parts: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KahlerReport {
    pub omega_j: LatticeVector,
    pub candidate_index: usize,
    pub candidates_examined: usize,
    pub bound: u32,
    pub type4: Type4Outcome,
    pub plane_gram: [[QuadScalar; 2]; 2],
    pub falsifier: FalsifierReport,
    pub charges: Vec<ClassCharge>,
}

fn check_candidate(
    base: &Scenario,
    params: &SearchParams,
    t: usize,
) -> Result<KahlerReport, CandidateOutcome> {
    let omega = params.candidate(t, &base.pic_basis, &base.split.sigma0);
    let mut out = CandidateOutcome {
        index: t,
        omega_j: omega.clone(),
        failures: Vec::new(),
        zero_real_parts: 0,
    };
    let ch = &base.charge;
    let proxy = [
        (pair(&omega, &ch.p).is_zero() && pair(&omega, &ch.q).is_zero(), "omega_J not orthogonal to p, q"),
        (pair(&omega, &omega).is_positive(), "omega_J^2 <= 0"),
        (pair(&omega, &base.split.f).is_positive(), "omega_J.f <= 0"),
        (pair(&omega, &params.omega_ref).is_positive(), "omega_J.omega_ref <= 0"),
    ];
    for (ok, why) in proxy {
        if !ok {
            out.failures.push(why.into());
        }
    }
    if !out.failures.is_empty() {
        return Err(out);
    }
    let scenario = match base.with_omega_j(&omega) {
        Ok(s) => s,
        Err(e) => {
            out.failures.push(e.to_string());
            return Err(out);
        }
    };
    let charges = match verify_reality(&scenario) {
        Ok(r) => r.charges,
        Err(e) => {
            out.failures.push(e.to_string());
            return Err(out);
        }
    };
    out.zero_real_parts = charges.iter().filter(|c| c.z.re.is_zero()).count();
    if out.zero_real_parts > 0 {
        out.failures.push(format!("{} classes with Re Z = 0", out.zero_real_parts));
    }
    if !is_positive_plane(&scenario.psi) {
        out.failures.push("Psi does not span a positive plane".into());
    }
    if !out.failures.is_empty() {
        return Err(out);
    }
    let ns = ns_of_mirror(&scenario.mirror.period);
    let falsifier = match p0_falsifier(&scenario.psi, &ns, params.bound) {
        Ok(f) => f,
        Err(e) => {
            out.failures.push(e.to_string());
            return Err(out);
        }
    };
    if let Some(d) = &falsifier.hit {
        out.failures.push(format!("(-2)-class {d} in the box"));
    }
    if params.require_complete {
        match &falsifier.complete_hits {
            None => out.failures.push("complete enumeration unavailable".into()),
            Some(h) if !h.is_empty() => {
                out.failures.push(format!("(-2)-class {} outside the box", h[0]))
            }
            _ => {}
        }
    }
    if !out.failures.is_empty() {
        return Err(out);
    }
    Ok(KahlerReport {
        omega_j: omega,
        candidate_index: t,
        candidates_examined: t + 1,
        bound: params.bound,
        type4: Type4Outcome::Certificate {
            discriminant: QuadScalar::zero(),
            two_p_sq: QuadScalar::zero(),
            checked: Vec::new(),
        },
        plane_gram: plane_gram(&scenario.psi),
        falsifier,
        charges,
    })
}

/// Searches the candidate family for a Kähler representative whose mirror
/// point avoids every (-2)-class found and has `Re Z(mu(l_i)) != 0` for the
/// whole Picard basis. Candidates run in parallel batches; the lowest
/// successful index wins.
pub fn kahler_search(
    scenario: &Scenario,
    params: &SearchParams,
) -> Result<KahlerReport, StabilityError> {
    params.validate()?;
    if !scenario.b_field.is_zero() {
        return Err(StabilityError::PreconditionViolation("the search needs B = 0".into()));
    }
    let type4 = type4_certificate(&scenario.charge, &scenario.split)?;
    if let Type4Outcome::Counterexample { delta, .. } = type4 {
        return Err(StabilityError::Obstructed { delta });
    }
    let batch = rayon::current_num_threads().max(1);
    let mut best: Option<CandidateOutcome> = None;
    let mut start = 0;
    while start < params.max_iter {
        let end = (start + batch).min(params.max_iter);
        let results: Vec<Result<KahlerReport, CandidateOutcome>> = (start..end)
            .into_par_iter()
            .map(|t| check_candidate(scenario, params, t))
            .collect();
        for r in results {
            match r {
                Ok(mut report) => {
                    report.type4 = type4;
                    return Ok(report);
                }
                Err(o) => {
                    let better = best.as_ref().is_none_or(|b| o.failures.len() < b.failures.len());
                    if better {
                        best = Some(o);
                    }
                }
            }
        }
        start = end;
    }
    Err(StabilityError::SearchExhausted {
        tried: params.max_iter,
        best: best.map(Box::new),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WallIntersectionReport {
    /// `true` where `l_i` was replaced by `-l_i`.
    pub flipped: Vec<bool>,
    pub charges: Vec<ClassCharge>,
    pub walls: Vec<WallReport>,
    pub members: usize,
}

/// Wall reports for every pair `i < j` of `signs[i] mu(l_i)`.
pub fn pairwise_walls(
    psi: &StabilityPoint,
    classes: &[MukaiVector],
) -> Result<Vec<WallReport>, StabilityError> {
    let zs: Vec<QuadComplex> = classes
        .iter()
        .map(|v| central_charge(psi, v))
        .collect::<Result<_, _>>()?;
    let mut out = Vec::new();
    for i in 0..zs.len() {
        for j in i + 1..zs.len() {
            out.push(WallReport {
                pair: (i, j),
                member: positive_ratio(&zs[i], &zs[j]),
                z1: zs[i].clone(),
                z2: zs[j].clone(),
                kind: "generalized".into(),
            });
        }
    }
    Ok(out)
}

/// Flips signs so every `Z(mu(l_i))` is positive, then checks that the
/// stability point lies on the generalized wall of every pair.
pub fn verify_wall_intersection(scenario: &Scenario) -> Result<WallIntersectionReport, StabilityError> {
    let reality = verify_reality(scenario)?;
    let mut flipped = Vec::new();
    let mut classes = Vec::new();
    let mut charges = Vec::new();
    for c in reality.charges {
        let flip = c.z.re.is_negative();
        flipped.push(flip);
        charges.push(if flip {
            ClassCharge {
                class: -&c.class,
                mukai: c.mukai.neg(),
                z: -&c.z,
            }
        } else {
            c
        });
    }
    classes.extend(charges.iter().map(|c| c.mukai.clone()));
    let walls = pairwise_walls(&scenario.psi, &classes)?;
    if let Some(w) = walls.iter().find(|w| !w.member) {
        return Err(StabilityError::WallFailure {
            i: w.pair.0,
            j: w.pair.1,
        });
    }
    let members = walls.len();
    Ok(WallIntersectionReport {
        flipped,
        charges,
        walls,
        members,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::BinaryEvenForm;
    use crate::lattice::{E8_A, U1};

    fn q8() -> LatticeVector {
        Charge::standard(&BinaryEvenForm::new(2, 0, 8).unwrap()).q
    }

    #[test]
    fn pairing_examples() {
        let w = MukaiVector::from_parts(0, &[], -1);
        let wstar = MukaiVector::from_parts(1, &[], 0);
        assert_eq!(mukai_pair(&w, &wstar), BigInt::from(1));
        let s = MukaiVector::from_parts(1, &[], 1);
        assert_eq!(mukai_pair(&s, &s), BigInt::from(-2));
    }

    #[test]
    fn exp_point_examples() {
        let zero = LatticeVector::zero(RANK);
        let pt = exp_point(&zero, &q8()).unwrap();
        assert_eq!(pt.psi.re.coords[S_SLOT], QuadScalar::int(-4));
        assert_eq!(pt.psi.re.coords[R_SLOT], QuadScalar::one());
        assert!(pt.psi.im.coords[S_SLOT].is_zero());
        assert_eq!(exp_point(&zero, &zero), Err(StabilityError::NotPositive));
    }

    #[test]
    fn central_charge_examples() {
        let zero = LatticeVector::zero(RANK);
        let pt = exp_point(&zero, &q8()).unwrap();
        let w = MukaiVector::from_parts(0, &[], -1);
        assert_eq!(central_charge(&pt, &w).unwrap(), QuadComplex::one());
        let s = MukaiVector::from_parts(1, &[], 1);
        assert_eq!(central_charge(&pt, &s).unwrap(), QuadComplex::real(QuadScalar::int(3)));
        assert_eq!(plane_gram(&pt)[0][0], QuadScalar::int(8));
        assert_eq!(plane_gram(&pt)[1][1], QuadScalar::int(8));
        assert!(plane_gram(&pt)[0][1].is_zero());
        assert!(is_positive_plane(&pt));
    }

    #[test]
    fn sigma0_charge_is_minus_b_dot_omega() {
        let mut b = LatticeVector::zero(RANK);
        b.coords[E8_A] = QuadScalar::int(1);
        let mut omega = q8();
        omega.coords[E8_A + 2] = QuadScalar::int(1);
        let pt = exp_point(&b, &omega).unwrap();
        let s = MukaiVector::from_parts(1, &[], 1);
        let z = central_charge(&pt, &s).unwrap();
        assert_eq!(z.im, -pair(&b, &omega));
        assert!(!z.im.is_zero());
    }

    #[test]
    fn wall_examples() {
        let one = QuadComplex::one();
        let three = QuadComplex::real(QuadScalar::int(3));
        assert!(positive_ratio(&one, &three));
        assert!(positive_ratio(&one, &one));
        assert!(!positive_ratio(&one, &-&one));
        assert!(!positive_ratio(&one, &QuadComplex::zero()));
        assert!(!positive_ratio(&one, &QuadComplex::i()));
    }

    #[test]
    fn type4_examples() {
        let split = SplitData::standard();
        let ch = |c| Charge::standard(&BinaryEvenForm::new(2, 0, c).unwrap());
        assert!(type4_certificate(&ch(8), &split).unwrap().is_certificate());
        assert!(type4_certificate(&ch(4), &split).unwrap().is_certificate());
        match type4_certificate(&ch(2), &split).unwrap() {
            Type4Outcome::Counterexample { m, n, delta } => {
                assert_eq!((m, n), (0, 1));
                assert_eq!(delta, MukaiVector::from_class(0, &split.sigma0, 0).unwrap());
            }
            other => panic!("expected counterexample, got {other:?}"),
        }
    }

    #[test]
    fn falsifier_bound_zero_is_empty() {
        let zero = LatticeVector::zero(RANK);
        let pt = exp_point(&zero, &q8()).unwrap();
        let ns = k3_complement(&[q8()]);
        let rep = p0_falsifier(&pt, &ns, 0).unwrap();
        assert!(rep.hit.is_none());
    }

    #[test]
    fn mukai_serde_round_trip() {
        let v = MukaiVector::from_parts(1, &[0, 2, -1], -3);
        let text = serde_json::to_string(&v).unwrap();
        let back: MukaiVector = serde_json::from_str(&text).unwrap();
        assert_eq!(back, v);
        assert_eq!(v.r(), &BigInt::from(1));
        assert_eq!(v.s(), &BigInt::from(-3));
        assert_eq!(v.d().coords[U1 + 1], QuadScalar::int(2));
    }
}
