//! A charge, a fibration and a Kähler representative, carried through the
//! attractor solve, the hyperkähler rotation and the mirror map to the
//! stability point on the mirror.

use serde::Serialize;
use thiserror::Error;

use crate::attractor::{
    hyperkahler_rotate, in_k3_block, lift, solve_attractor, threefold_central_charge,
    verify_attractor, z_k3, AttractorData, AttractorError, Charge,
};
use crate::exact::{QuadComplex, QuadScalar};
use crate::forms::BinaryEvenForm;
use crate::lattice::{k3_complement, mukai, LatticeVector, RANK};
use crate::mirror::{mirror_period, MirrorError, MirrorTriple, SplitData};
use crate::stability::{exp_point, StabilityError, StabilityPoint};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScenarioError {
    #[error("f and sigma0 must be orthogonal to p and q")]
    SplitNotInPicard,
    #[error("B must lie in the K3 lattice")]
    BadBField,
    #[error("threefold charge of class {index} is {value}, expected {expected}")]
    ThreefoldMismatch {
        index: usize,
        value: String,
        expected: String,
    },
    #[error(transparent)]
    Attractor(#[from] AttractorError),
    #[error(transparent)]
    Mirror(#[from] MirrorError),
    #[error(transparent)]
    Stability(Box<StabilityError>),
}

impl From<StabilityError> for ScenarioError {
    fn from(e: StabilityError) -> Self {
        ScenarioError::Stability(Box::new(e))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Scenario {
    pub charge: Charge,
    #[serde(skip)]
    pub split: SplitData,
    pub lambda: QuadComplex,
    pub attractor: AttractorData,
    pub b_field: LatticeVector,
    pub mirror: MirrorTriple,
    pub psi: StabilityPoint,
    /// `f, sigma0` followed by a basis of `<p, q, f, sigma0>^perp`.
    pub pic_basis: Vec<LatticeVector>,
    /// `p^2 omega_I`, recorded when it is integral; nothing downstream uses it.
    pub polarization: Option<LatticeVector>,
}

fn pair(x: &LatticeVector, y: &LatticeVector) -> QuadScalar {
    mukai().pair(x, y).expect("vectors live in the Mukai lattice")
}

impl Scenario {
    pub fn assemble(
        charge: Charge,
        split: SplitData,
        omega_j: &LatticeVector,
        b_field: &LatticeVector,
    ) -> Result<Self, ScenarioError> {
        for x in [&split.f, &split.sigma0] {
            if !pair(x, &charge.p).is_zero() || !pair(x, &charge.q).is_zero() {
                return Err(ScenarioError::SplitNotInPicard);
            }
        }
        let mut pic_basis = vec![split.f.clone(), split.sigma0.clone()];
        pic_basis.extend(
            k3_complement(&[
                charge.p.clone(),
                charge.q.clone(),
                split.f.clone(),
                split.sigma0.clone(),
            ])
            .vectors(),
        );
        Self::build(charge, split, pic_basis, omega_j, b_field)
    }

    fn build(
        charge: Charge,
        split: SplitData,
        pic_basis: Vec<LatticeVector>,
        omega_j: &LatticeVector,
        b_field: &LatticeVector,
    ) -> Result<Self, ScenarioError> {
        let b_field = lift(b_field).map_err(|_| ScenarioError::BadBField)?;
        if !in_k3_block(&b_field) {
            return Err(ScenarioError::BadBField);
        }
        let (tau, period_j) = solve_attractor(&charge)?;
        let lambda = verify_attractor(&charge, &tau, &period_j)?;
        let attractor = hyperkahler_rotate(&charge, &tau, omega_j)?;
        let mirror = mirror_period(&split, &attractor.period_i(), &attractor.omega_i, &b_field)?;
        let psi = exp_point(&mirror.b_field, &mirror.omega)?;
        let scaled = attractor.omega_i.scale(&charge.p_sq());
        let polarization = scaled.is_integral().then_some(scaled);
        Ok(Scenario {
            charge,
            split,
            lambda,
            attractor,
            b_field,
            mirror,
            psi,
            pic_basis,
            polarization,
        })
    }

    /// Standard realization of a form with `omega_J = 2f + sigma0` and `B = 0`.
    pub fn standard(form: &BinaryEvenForm) -> Result<Self, ScenarioError> {
        let split = SplitData::standard();
        let omega0 = &split.f.scale(&QuadScalar::int(2)) + &split.sigma0;
        Self::assemble(
            Charge::standard(form),
            split,
            &omega0,
            &LatticeVector::zero(RANK),
        )
    }

    /// The same charge and fibration with another Kähler representative.
    pub fn with_omega_j(&self, omega_j: &LatticeVector) -> Result<Self, ScenarioError> {
        Self::build(
            self.charge.clone(),
            self.split.clone(),
            self.pic_basis.clone(),
            omega_j,
            &self.b_field,
        )
    }
}

/// `Z(0 dx + l dy)` against `omega_J . l` for one Picard class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreefoldCharge {
    pub class: LatticeVector,
    pub z: QuadComplex,
    pub k3: QuadScalar,
}

/// Every charge `l dy` with `l` in the Picard basis has a real threefold
/// central charge equal to `omega_J . l`.
pub fn verify_threefold(scenario: &Scenario) -> Result<Vec<ThreefoldCharge>, ScenarioError> {
    let zero = LatticeVector::zero(RANK);
    scenario
        .pic_basis
        .iter()
        .enumerate()
        .map(|(index, l)| {
            let z = threefold_central_charge(&scenario.attractor, &zero, l);
            let k3 = z_k3(&scenario.attractor.omega_j, l);
            if z != QuadComplex::real(k3.clone()) {
                return Err(ScenarioError::ThreefoldMismatch {
                    index,
                    value: z.to_string(),
                    expected: k3.to_string(),
                });
            }
            Ok(ThreefoldCharge {
                class: l.clone(),
                z,
                k3,
            })
        })
        .collect()
}
