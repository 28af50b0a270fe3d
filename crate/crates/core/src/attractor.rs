//! Attractor points of K3 x T2 for a charge `gamma = p dx + q dy`.
//!
//! The attractor complex structure has `tau = (p.q + i sqrt(D)) / p^2` and
//! holomorphic 2-form `Omega_J = q - conj(tau) p`, where `D = p^2 q^2 - (p.q)^2`.
//! Rotating to the complex structure I makes `Re Omega_I` the free Kähler
//! representative `omega_J`, while `omega_I = Im(tau) p` and
//! `Im Omega_I = q - Re(tau) p` are fixed by the charge.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{ArithError, QuadComplex, QuadScalar};
use crate::forms::BinaryEvenForm;
use crate::lattice::{
    k3_complement, mukai, ComplexVector, LatticeError, LatticeVector, Sublattice, K3_RANK, RANK,
    U2, U3,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttractorError {
    #[error("degenerate charge: {0}")]
    DegenerateCharge(String),
    #[error("not an attractor point: {0}")]
    NotAttractor(String),
    #[error("Kähler representative is not orthogonal to p and q")]
    NotOrthogonal,
    #[error("Kähler representative has nonpositive square")]
    NotPositive,
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

/// Lifts a 22- or 24-entry vector into Mukai coordinates.
pub fn lift(v: &LatticeVector) -> Result<LatticeVector, LatticeError> {
    match v.len() {
        K3_RANK => Ok(v.resized(RANK)),
        RANK => Ok(v.clone()),
        n => Err(LatticeError::DimensionMismatch {
            expected: RANK,
            got: n,
        }),
    }
}

/// Whether a Mukai-coordinate vector lies in the K3 block.
pub fn in_k3_block(v: &LatticeVector) -> bool {
    v.coords[K3_RANK..].iter().all(QuadScalar::is_zero)
}

/// The pair `(p, q)` of integral K3-lattice classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Charge {
    pub p: LatticeVector,
    pub q: LatticeVector,
}

impl Charge {
    pub fn new(p: LatticeVector, q: LatticeVector) -> Result<Self, AttractorError> {
        let (p, q) = (lift(&p)?, lift(&q)?);
        if !p.is_integral() || !q.is_integral() {
            return Err(LatticeError::NotIntegral.into());
        }
        if !in_k3_block(&p) || !in_k3_block(&q) {
            return Err(AttractorError::DegenerateCharge(
                "charge has Mukai components".into(),
            ));
        }
        Ok(Charge { p, q })
    }

    /// `p = e1 + (a/2) e2` in U2 and `q = b e2(U2) + e1(U3) + (c/2) e2(U3)`,
    /// so that `(p^2, p.q, q^2) = (a, b, c)`.
    pub fn standard(form: &BinaryEvenForm) -> Self {
        let mut p = LatticeVector::zero(RANK);
        p.coords[U2] = QuadScalar::one();
        p.coords[U2 + 1] = QuadScalar::int(form.a / 2);
        let mut q = LatticeVector::zero(RANK);
        q.coords[U2 + 1] = QuadScalar::int(form.b);
        q.coords[U3] = QuadScalar::one();
        q.coords[U3 + 1] = QuadScalar::int(form.c / 2);
        Charge { p, q }
    }

    pub fn p_sq(&self) -> QuadScalar {
        pair(&self.p, &self.p)
    }

    pub fn pq(&self) -> QuadScalar {
        pair(&self.p, &self.q)
    }

    pub fn q_sq(&self) -> QuadScalar {
        pair(&self.q, &self.q)
    }

    /// `p^2 q^2 - (p.q)^2`.
    pub fn discriminant(&self) -> BigInt {
        let d = &self.p_sq() * &self.q_sq() - self.pq().pow2();
        d.to_integer().expect("integral charge")
    }

    pub fn form(&self) -> Result<BinaryEvenForm, AttractorError> {
        BinaryEvenForm::from_vectors(mukai(), &self.p, &self.q)
            .map_err(|e| AttractorError::DegenerateCharge(e.to_string()))
    }
}

/// Attractor data after the hyperkähler rotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttractorData {
    pub tau: QuadComplex,
    pub omega_j: LatticeVector,
    /// `Omega_J = q - conj(tau) p`.
    pub period_j: ComplexVector,
    pub omega_i: LatticeVector,
    pub im_period_i: LatticeVector,
    /// Square-free part of the discriminant.
    pub field: u64,
    /// Whether `omega_J^2 = omega_I^2`; recorded, never required.
    pub is_normalized: bool,
}

impl AttractorData {
    /// `Omega_I = omega_J + i Im Omega_I`.
    pub fn period_i(&self) -> ComplexVector {
        ComplexVector::new(self.omega_j.clone(), self.im_period_i.clone())
    }
}

/// `tau` and `Omega = q - conj(tau) p`.
pub fn solve_attractor(ch: &Charge) -> Result<(QuadComplex, ComplexVector), AttractorError> {
    let p2 = ch.p_sq();
    if !p2.is_positive() {
        return Err(AttractorError::DegenerateCharge(format!("p^2 = {p2} must be positive")));
    }
    let d = ch.discriminant();
    if d <= BigInt::from(0) {
        return Err(AttractorError::DegenerateCharge(format!("D = {d} must be positive")));
    }
    let root = QuadScalar::sqrt_of(&d)
        .ok_or_else(|| AttractorError::DegenerateCharge(format!("D = {d} is too large")))?;
    let tau = QuadComplex::new(ch.pq().try_div(&p2)?, root.try_div(&p2)?);
    let omega = ComplexVector::new(
        &ch.q - &ch.p.scale(&tau.re),
        ch.p.scale(&tau.im),
    );
    Ok((tau, omega))
}

/// Solves `gamma = lambda Omega30 + conj(lambda Omega30)` with
/// `Omega30 = (dx + tau dy) ^ Omega` and returns `lambda`.
///
/// `Omega` must be a period (`Omega^2 = 0`, `Omega.conj(Omega) > 0`) in the
/// span of `p, q`, and `tau` must lie in the upper half-plane. The dx-part of
/// the equation fixes `lambda`; the dy-part is then checked exactly.
pub fn verify_attractor(
    ch: &Charge,
    tau: &QuadComplex,
    omega: &ComplexVector,
) -> Result<QuadComplex, AttractorError> {
    let fail = |why: &str| AttractorError::NotAttractor(why.to_string());
    if !tau.im.is_positive() {
        return Err(fail("Im tau must be positive"));
    }
    if !pair_c(omega, omega).is_zero() {
        return Err(fail("Omega^2 != 0"));
    }
    if !pair_c(omega, &omega.conj()).re.is_positive() {
        return Err(fail("Omega.conj(Omega) <= 0"));
    }
    // Omega = x p + y q from the 2x2 Gram system
    let (pp, pq, qq) = (ch.p_sq(), ch.pq(), ch.q_sq());
    let det = &pp * &qq - pq.pow2();
    if det.is_zero() {
        return Err(AttractorError::DegenerateCharge("p and q are dependent".into()));
    }
    let solve = |op: QuadScalar, oq: QuadScalar| -> Result<(QuadScalar, QuadScalar), ArithError> {
        let x = (&op * &qq - &oq * &pq).try_div(&det)?;
        let y = (&oq * &pp - &op * &pq).try_div(&det)?;
        Ok((x, y))
    };
    let (xr, yr) = solve(pair(&omega.re, &ch.p), pair(&omega.re, &ch.q))?;
    let (xi, yi) = solve(pair(&omega.im, &ch.p), pair(&omega.im, &ch.q))?;
    let x = QuadComplex::new(xr, xi);
    let y = QuadComplex::new(yr, yi);
    let rebuilt = ComplexVector::new(
        &ch.p.scale(&x.re) + &ch.q.scale(&y.re),
        &ch.p.scale(&x.im) + &ch.q.scale(&y.im),
    );
    if &rebuilt != omega {
        return Err(fail("Omega is not in the span of p and q"));
    }
    // dx-part: 2 Re(lambda x) = 1, 2 Re(lambda y) = 0 with lambda = u + i v
    let two = QuadScalar::int(2);
    let a11 = &two * &x.re;
    let a12 = -(&two * &x.im);
    let a21 = &two * &y.re;
    let a22 = -(&two * &y.im);
    let m_det = &a11 * &a22 - &a12 * &a21;
    if m_det.is_zero() {
        return Err(fail("dx-component system is singular"));
    }
    let u = a22.try_div(&m_det)?;
    let v = (-&a21).try_div(&m_det)?;
    let lambda = QuadComplex::new(u, v);
    // dy-part: 2 Re(lambda tau x) = 0, 2 Re(lambda tau y) = 1
    let lt = &lambda * tau;
    let dy_p = (&lt * &x).re.scale(&crate::exact::rat(2, 1));
    let dy_q = (&lt * &y).re.scale(&crate::exact::rat(2, 1));
    if !dy_p.is_zero() || dy_q != QuadScalar::one() {
        return Err(fail("dy-component of the attractor equation fails"));
    }
    Ok(lambda)
}

/// Fills in the I-rotated data for a Kähler representative `omega_J`.
pub fn hyperkahler_rotate(
    ch: &Charge,
    tau: &QuadComplex,
    omega_j: &LatticeVector,
) -> Result<AttractorData, AttractorError> {
    let omega_j = lift(omega_j)?;
    if !pair(&omega_j, &ch.p).is_zero() || !pair(&omega_j, &ch.q).is_zero() {
        return Err(AttractorError::NotOrthogonal);
    }
    let w2 = pair(&omega_j, &omega_j);
    if !w2.is_positive() {
        return Err(AttractorError::NotPositive);
    }
    let period_j = ComplexVector::new(&ch.q - &ch.p.scale(&tau.re), ch.p.scale(&tau.im));
    let omega_i = ch.p.scale(&tau.im);
    let im_period_i = &ch.q - &ch.p.scale(&tau.re);
    let is_normalized = w2 == pair(&omega_i, &omega_i);
    let field = tau.field();
    Ok(AttractorData {
        tau: tau.clone(),
        omega_j,
        period_j,
        omega_i,
        im_period_i,
        field,
        is_normalized,
    })
}

/// Integral basis of the Picard lattice `<p, q>^perp` inside the K3 lattice.
pub fn ns_lattice(ch: &Charge) -> Sublattice {
    k3_complement(&[ch.p.clone(), ch.q.clone()])
}

/// `omega_J . l`, the K3 central charge of a holomorphic class.
pub fn z_k3(omega_j: &LatticeVector, l: &LatticeVector) -> QuadScalar {
    pair(omega_j, l)
}

/// `Omega_I . (q' - tau p')` for the threefold charge `p' dx + q' dy`.
pub fn threefold_central_charge(
    data: &AttractorData,
    p_prime: &LatticeVector,
    q_prime: &LatticeVector,
) -> QuadComplex {
    let tau = &data.tau;
    let target = ComplexVector::new(
        q_prime - &p_prime.scale(&tau.re),
        -&p_prime.scale(&tau.im),
    );
    pair_c(&data.period_i(), &target)
}
