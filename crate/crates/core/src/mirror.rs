//! The lattice mirror map attached to an elliptic fibration `(f, sigma0)`.
//!
//! The fibration gives a hyperbolic plane `U' = <v, v*>` with `v = f` and
//! `v* = f + sigma0`, and `Gamma = Gamma' + U'`. The mirror map is the
//! identity on `Gamma'` and swaps `U'` with the Mukai block, sending `v` to
//! `w = (0, 0, -1)` and `v*` to `w* = (1, 0, 0)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attractor::{in_k3_block, lift};
use crate::exact::{ArithError, QuadComplex, QuadScalar};
use crate::lattice::{
    field_rank, k3_complement, mukai, mukai_w, mukai_wstar, project_off_hyperbolic, signature,
    ComplexVector, LatticeError, LatticeVector, Sublattice, RANK, U1,
};
use crate::stability::MukaiVector;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MirrorError {
    #[error("bad fibration classes: {0}")]
    BadFibrationClasses(String),
    #[error("(Re Omega).v vanishes, the mirror period cannot be normalized")]
    NormalizationFailure,
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

fn pair(x: &LatticeVector, y: &LatticeVector) -> QuadScalar {
    mukai().pair(x, y).expect("vectors live in the Mukai lattice")
}

fn pair_c(x: &ComplexVector, y: &ComplexVector) -> QuadComplex {
    mukai()
        .pair_complex(x, y)
        .expect("vectors live in the Mukai lattice")
}

fn precondition(why: impl Into<String>) -> MirrorError {
    MirrorError::PreconditionViolation(why.into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitData {
    pub f: LatticeVector,
    pub sigma0: LatticeVector,
    pub v: LatticeVector,
    pub vstar: LatticeVector,
    pub gamma_prime: Sublattice,
    pub w: LatticeVector,
    pub wstar: LatticeVector,
}

/// `f = e1`, `sigma0 = e2 - e1` in the first hyperbolic plane.
pub fn standard_fibration() -> (LatticeVector, LatticeVector) {
    let f = mukai().unit(U1);
    let sigma0 = &mukai().unit(U1 + 1) - &f;
    (f, sigma0)
}

pub fn make_split(f: &LatticeVector, sigma0: &LatticeVector) -> Result<SplitData, MirrorError> {
    let bad = |why: &str| MirrorError::BadFibrationClasses(why.to_string());
    let (f, sigma0) = (lift(f)?, lift(sigma0)?);
    if !f.is_integral() || !sigma0.is_integral() {
        return Err(bad("classes must be integral"));
    }
    if !in_k3_block(&f) || !in_k3_block(&sigma0) {
        return Err(bad("classes must lie in the K3 lattice"));
    }
    if !pair(&f, &f).is_zero() {
        return Err(bad("f^2 != 0"));
    }
    if pair(&sigma0, &sigma0) != QuadScalar::int(-2) {
        return Err(bad("sigma0^2 != -2"));
    }
    if pair(&f, &sigma0) != QuadScalar::one() {
        return Err(bad("f.sigma0 != 1"));
    }
    let vstar = &f + &sigma0;
    let gamma_prime = k3_complement(&[f.clone(), sigma0.clone()]);
    Ok(SplitData {
        v: f.clone(),
        f,
        sigma0,
        vstar,
        gamma_prime,
        w: mukai_w(),
        wstar: mukai_wstar(),
    })
}

impl SplitData {
    pub fn standard() -> Self {
        let (f, sigma0) = standard_fibration();
        make_split(&f, &sigma0).expect("standard fibration classes")
    }

    /// `pr(x) = x - (x.v*) v - (x.v) v*`, the projection to `Gamma'`.
    pub fn project(&self, x: &LatticeVector) -> LatticeVector {
        project_off_hyperbolic(mukai(), &self.v, &self.vstar, x).expect("rank-24 vector")
    }

    pub fn project_complex(&self, z: &ComplexVector) -> ComplexVector {
        ComplexVector::new(self.project(&z.re), self.project(&z.im))
    }
}

pub fn project_gamma_prime(split: &SplitData, x: &LatticeVector) -> Result<LatticeVector, MirrorError> {
    let x = lift(x)?;
    if !in_k3_block(&x) {
        return Err(precondition("pr is defined on the K3 lattice"));
    }
    Ok(split.project(&x))
}

/// `(Omega_check, omega_check, B_check)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MirrorTriple {
    pub period: ComplexVector,
    pub omega: LatticeVector,
    pub b_field: LatticeVector,
}

/// `(B + i omega)` as a complex vector.
fn complexified(b: &LatticeVector, omega: &LatticeVector) -> ComplexVector {
    ComplexVector::new(b.clone(), omega.clone())
}

fn check_period_input(
    split: &SplitData,
    period: &ComplexVector,
    omega: &LatticeVector,
    b: &LatticeVector,
) -> Result<QuadScalar, MirrorError> {
    for x in [&period.re, &period.im, omega, b] {
        if x.len() != RANK || !in_k3_block(x) {
            return Err(precondition("inputs must be K3-lattice vectors"));
        }
    }
    if !pair(&period.im, &split.v).is_zero() {
        return Err(precondition("Im Omega must be orthogonal to v"));
    }
    if !pair(omega, &split.v).is_zero() || !pair(b, &split.v).is_zero() {
        return Err(precondition("omega and B must lie in Gamma' + R v"));
    }
    let c = pair(&period.re, &split.v);
    if c.is_zero() {
        return Err(MirrorError::NormalizationFailure);
    }
    Ok(c)
}

/// The mirror of a period triple `(Omega, omega, B)`:
///
/// `Omega_check = (pr(B + i omega) - (B + i omega)^2 v / 2 + v*) / c` and
/// `B_check + i omega_check = (pr(Omega) - (Omega.B) v) / c`, with
/// `c = (Re Omega).v`.
pub fn mirror_period(
    split: &SplitData,
    period: &ComplexVector,
    omega: &LatticeVector,
    b: &LatticeVector,
) -> Result<MirrorTriple, MirrorError> {
    let c = check_period_input(split, period, omega, b)?;
    let inv = QuadComplex::real(c.recip()?);
    let z = complexified(b, omega);
    let z2 = pair_c(&z, &z);
    let v = ComplexVector::real(split.v.clone());
    let vstar = ComplexVector::real(split.vstar.clone());
    let half = QuadComplex::real(QuadScalar::frac(1, 2));
    let raw = &(&split.project_complex(&z) - &v.scale(&(&half * &z2))) + &vstar;
    let check_period = raw.scale(&inv);
    let ob = pair_c(period, &ComplexVector::real(b.clone()));
    let bw = &split.project_complex(period) - &v.scale(&ob);
    let bw = bw.scale(&inv);
    Ok(MirrorTriple {
        period: check_period,
        omega: bw.im,
        b_field: bw.re,
    })
}

/// Rescales a period so that its pairing with `v` (its `v*`-coefficient) is 1.
pub fn canonicalize(split: &SplitData, period: &ComplexVector) -> Result<ComplexVector, MirrorError> {
    let k = pair_c(period, &ComplexVector::real(split.v.clone()));
    if k.is_zero() {
        return Err(MirrorError::NormalizationFailure);
    }
    let inv = QuadComplex::one().try_div(&k)?;
    Ok(period.scale(&inv))
}

/// `mu(l) = pr(l) + (l.v*) w + (l.v) w*`, i.e. `r = l.v`, `s = -(l.v*)`.
pub fn mirror_class(split: &SplitData, l: &LatticeVector) -> Result<MukaiVector, MirrorError> {
    let l = lift(l)?;
    if !l.is_integral() || !in_k3_block(&l) {
        return Err(precondition("mirror classes are defined for integral K3 classes"));
    }
    let image = &(&split.project(&l) + &split.w.scale(&pair(&l, &split.vstar)))
        + &split.wstar.scale(&pair(&l, &split.v));
    Ok(MukaiVector::from_lattice(&image)?)
}

/// `a(z) = z - z^2 v / 2 + v*` for `z` orthogonal to `U'`.
pub fn tube_map(split: &SplitData, z: &ComplexVector) -> Result<ComplexVector, MirrorError> {
    let v = ComplexVector::real(split.v.clone());
    let vstar = ComplexVector::real(split.vstar.clone());
    if !pair_c(z, &v).is_zero() || !pair_c(z, &vstar).is_zero() {
        return Err(precondition("z must be orthogonal to U'"));
    }
    let z2 = pair_c(z, z);
    let half = QuadComplex::real(QuadScalar::frac(1, 2));
    Ok(&(z - &v.scale(&(&half * &z2))) + &vstar)
}

/// Bases of `H1 = {x - (x.B) w : x in P}` and
/// `H2 = <(omega^2 - B^2) w / 2 + w* + B, omega - (omega.B) w>`.
pub fn period_embed(
    split: &SplitData,
    p_basis: [&LatticeVector; 2],
    omega: &LatticeVector,
    b: &LatticeVector,
) -> Result<(Vec<LatticeVector>, Vec<LatticeVector>), MirrorError> {
    let [x1, x2] = p_basis;
    let g11 = pair(x1, x1);
    let g12 = pair(x1, x2);
    let g22 = pair(x2, x2);
    if !g11.is_positive() || !(&g11 * &g22 - g12.pow2()).is_positive() {
        return Err(precondition("P must span a positive 2-plane"));
    }
    if !pair(omega, x1).is_zero() || !pair(omega, x2).is_zero() {
        return Err(precondition("omega must be orthogonal to P"));
    }
    if !pair(omega, omega).is_positive() {
        return Err(precondition("omega^2 must be positive"));
    }
    let shift = |x: &LatticeVector| x - &split.w.scale(&pair(x, b));
    let h1 = vec![shift(x1), shift(x2)];
    let half = QuadScalar::frac(1, 2);
    let lead = &(&split.w.scale(&(&half * &(pair(omega, omega) - pair(b, b)))) + &split.wstar) + b;
    let h2 = vec![lead, shift(omega)];
    Ok((h1, h2))
}

/// Outcome of applying the mirror map twice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionReport {
    /// `span{Re, Im}` of the double mirror period equals that of `Omega`.
    pub subspace_equal: bool,
    /// The double mirror returns exactly `Omega`, `omega` and `B` when
    /// `Omega^2 = 0` and `omega` is orthogonal to `Re Omega`.
    pub period_recovered: bool,
    pub omega_recovered: bool,
    pub b_recovered: bool,
}

impl InvolutionReport {
    pub fn holds(&self) -> bool {
        self.subspace_equal
    }
}

pub fn mirror_involution_check(
    split: &SplitData,
    period: &ComplexVector,
    omega: &LatticeVector,
    b: &LatticeVector,
) -> Result<InvolutionReport, MirrorError> {
    let once = mirror_period(split, period, omega, b)?;
    let twice = mirror_period(split, &once.period, &once.omega, &once.b_field)?;
    let rows = |vs: &[&LatticeVector]| -> Vec<Vec<QuadScalar>> {
        vs.iter().map(|v| v.coords.clone()).collect()
    };
    let base = field_rank(&rows(&[&period.re, &period.im]));
    let back = field_rank(&rows(&[&twice.period.re, &twice.period.im]));
    let joint = field_rank(&rows(&[
        &period.re,
        &period.im,
        &twice.period.re,
        &twice.period.im,
    ]));
    Ok(InvolutionReport {
        subspace_equal: base == 2 && back == 2 && joint == 2,
        period_recovered: &twice.period == period,
        omega_recovered: &twice.omega == omega,
        b_recovered: &twice.b_field == b,
    })
}

/// The B = 0 mirror of an attractor point written out directly:
/// `Omega_check = (i Im(tau) p + Im(tau)^2 p^2 f / 2 + f + sigma0) / (omega_J.f)`,
/// `omega_check = (q - Re(tau) p) / (omega_J.f)`, `B_check = pr(omega_J) / (omega_J.f)`.
pub fn attractor_mirror_b0(
    split: &SplitData,
    p: &LatticeVector,
    q: &LatticeVector,
    tau: &QuadComplex,
    omega_j: &LatticeVector,
) -> Result<MirrorTriple, MirrorError> {
    let c = pair(omega_j, &split.f);
    if c.is_zero() {
        return Err(MirrorError::NormalizationFailure);
    }
    let inv = c.recip()?;
    let p2 = pair(p, p);
    let coeff = &(&tau.im.pow2() * &p2) * &QuadScalar::frac(1, 2);
    let re = &(&split.f.scale(&coeff) + &split.f) + &split.sigma0;
    let im = p.scale(&tau.im);
    Ok(MirrorTriple {
        period: ComplexVector::new(re.scale(&inv), im.scale(&inv)),
        omega: (q - &p.scale(&tau.re)).scale(&inv),
        b_field: split.project(omega_j).scale(&inv),
    })
}

/// Gram matrix of `(Re, Im)` of a complex vector is positive definite.
pub fn spans_positive_plane(z: &ComplexVector) -> bool {
    let g = [
        [pair(&z.re, &z.re), pair(&z.re, &z.im)],
        [pair(&z.im, &z.re), pair(&z.im, &z.im)],
    ];
    g[0][0].is_positive() && (&g[0][0] * &g[1][1] - g[0][1].pow2()).is_positive()
}

/// Signature helper for small exact Gram matrices.
pub fn gram_signature(vs: &[LatticeVector]) -> Option<crate::lattice::Signature> {
    let g: Vec<Vec<_>> = vs
        .iter()
        .map(|x| vs.iter().map(|y| pair(x, y)).collect::<Vec<_>>())
        .collect();
    let rational: Option<Vec<Vec<_>>> = g
        .iter()
        .map(|row| row.iter().map(|c| c.as_rational().cloned()).collect())
        .collect();
    rational.map(|r| signature(&r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attractor::{hyperkahler_rotate, solve_attractor, Charge};
    use crate::forms::BinaryEvenForm;
    use crate::lattice::{Signature, E8_A};

    fn diag(a: i64, c: i64) -> Charge {
        Charge::standard(&BinaryEvenForm::new(a, 0, c).unwrap())
    }

    fn omega0(split: &SplitData) -> LatticeVector {
        &split.f.scale(&QuadScalar::int(2)) + &split.sigma0
    }

    #[test]
    fn split_checks() {
        let s = SplitData::standard();
        assert_eq!(s.gamma_prime.rank(), 20);
        assert_eq!(pair(&s.vstar, &s.vstar), QuadScalar::zero());
        assert_eq!(pair(&s.v, &s.vstar), QuadScalar::one());
        let f = mukai().unit(U1);
        let e2 = mukai().unit(U1 + 1);
        assert!(matches!(make_split(&f, &e2), Err(MirrorError::BadFibrationClasses(_))));
    }

    #[test]
    fn projection() {
        let s = SplitData::standard();
        assert!(s.project(&s.f).is_zero());
        let root = mukai().unit(E8_A);
        assert_eq!(s.project(&root), root);
        assert_eq!(s.project(&(&omega0(&s) + &root)), root);
    }

    #[test]
    fn attractor_mirrors() {
        let s = SplitData::standard();
        for (c, expect_re) in [(8, 5), (2, 2)] {
            let ch = diag(2, c);
            let (tau, _) = solve_attractor(&ch).unwrap();
            let data = hyperkahler_rotate(&ch, &tau, &omega0(&s)).unwrap();
            let zero = LatticeVector::zero(RANK);
            let m = mirror_period(&s, &data.period_i(), &data.omega_i, &zero).unwrap();
            let re = &s.f.scale(&QuadScalar::int(expect_re)) + &s.sigma0;
            assert_eq!(m.period, ComplexVector::new(re, ch.p.scale(&tau.im)));
            assert_eq!(m.omega, ch.q);
            assert!(m.b_field.is_zero());
            let direct = attractor_mirror_b0(&s, &ch.p, &ch.q, &tau, &data.omega_j).unwrap();
            assert_eq!(direct, m);
        }
    }

    #[test]
    fn mirror_classes() {
        let s = SplitData::standard();
        assert_eq!(mirror_class(&s, &s.f).unwrap(), MukaiVector::from_parts(0, &[], -1));
        assert_eq!(mirror_class(&s, &s.sigma0).unwrap(), MukaiVector::from_parts(1, &[], 1));
        let root = mukai().unit(E8_A + 2);
        assert_eq!(mirror_class(&s, &root).unwrap().lattice_vector(), root);
    }

    #[test]
    fn tube_map_values() {
        let s = SplitData::standard();
        let zero = ComplexVector::real(LatticeVector::zero(RANK));
        assert_eq!(tube_map(&s, &zero).unwrap(), ComplexVector::real(s.vstar.clone()));
        let q = diag(2, 8).q;
        let a = tube_map(&s, &ComplexVector::imaginary(q.clone())).unwrap();
        let re = &s.v.scale(&QuadScalar::int(4)) + &s.vstar;
        assert_eq!(a, ComplexVector::new(re, q));
        assert_eq!(
            pair_c(&a, &ComplexVector::real(s.v.clone())),
            QuadComplex::one()
        );
    }

    #[test]
    fn embedding_is_positive() {
        let s = SplitData::standard();
        let ch = diag(2, 8);
        let (tau, _) = solve_attractor(&ch).unwrap();
        let data = hyperkahler_rotate(&ch, &tau, &omega0(&s)).unwrap();
        let zero = LatticeVector::zero(RANK);
        let (h1, h2) =
            period_embed(&s, [&data.omega_j, &data.im_period_i], &data.omega_i, &zero).unwrap();
        assert_eq!(h1[0], data.omega_j);
        for x in &h1 {
            for y in &h2 {
                assert!(pair(x, y).is_zero());
            }
        }
        let all: Vec<_> = h1.into_iter().chain(h2).collect();
        assert_eq!(gram_signature(&all), Some(Signature::new(4, 0, 0)));
    }

    #[test]
    fn involution_on_attractors() {
        let s = SplitData::standard();
        for c in [8, 2] {
            let ch = diag(2, c);
            let (tau, _) = solve_attractor(&ch).unwrap();
            // omega_J^2 = q^2 makes Omega_I a genuine period
            let half_q2 = QuadScalar::int(c / 2);
            let omega_j = &mukai().unit(U1) + &mukai().unit(U1 + 1).scale(&half_q2);
            let data = hyperkahler_rotate(&ch, &tau, &omega_j).unwrap();
            assert!(data.is_normalized);
            let zero = LatticeVector::zero(RANK);
            let rep = mirror_involution_check(&s, &data.period_i(), &data.omega_i, &zero).unwrap();
            assert!(rep.holds(), "{rep:?}");
            assert!(rep.omega_recovered && rep.b_recovered && rep.period_recovered);
        }
    }

    #[test]
    fn normalization_failure() {
        let s = SplitData::standard();
        let ch = diag(2, 8);
        let zero = LatticeVector::zero(RANK);
        let period = ComplexVector::new(ch.p.clone(), ch.q.clone());
        assert_eq!(
            mirror_period(&s, &period, &zero, &zero),
            Err(MirrorError::NormalizationFailure)
        );
    }
}
