//! The JSON scenario file and its translation into library inputs.

use std::collections::BTreeMap;
use std::path::Path;

use k3_attractor::attractor::{lift, Charge};
use k3_attractor::exact::QuadScalar;
use k3_attractor::forms::BinaryEvenForm;
use k3_attractor::lattice::{LatticeVector, RANK};
use k3_attractor::mirror::{make_split, SplitData};
use k3_attractor::scenario::Scenario;
use k3_attractor::stability::SearchParams;
use serde::{Deserialize, Serialize};

use crate::Failure;

/// A vector either as all 22 or 24 coordinates or as `{"index": value}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VectorSpec {
    Dense(Vec<QuadScalar>),
    Sparse(BTreeMap<String, QuadScalar>),
}

impl VectorSpec {
    fn resolve(&self, what: &str) -> Result<LatticeVector, Failure> {
        match self {
            VectorSpec::Dense(xs) => lift(&LatticeVector::new(xs.clone()))
                .map_err(|e| Failure::Parse(format!("{what}: {e}"))),
            VectorSpec::Sparse(entries) => {
                let mut v = LatticeVector::zero(RANK);
                for (key, x) in entries {
                    let i = key
                        .parse::<usize>()
                        .ok()
                        .filter(|&i| i < RANK)
                        .ok_or_else(|| Failure::Parse(format!("{what}: bad index {key:?}")))?;
                    v.coords[i] = x.clone();
                }
                Ok(v)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OmegaName {
    /// `2f + sigma0`.
    Omega0,
    /// The first successful candidate of the Kähler search.
    Search,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OmegaSpec {
    Named(OmegaName),
    Explicit(VectorSpec),
}

impl Default for OmegaSpec {
    fn default() -> Self {
        OmegaSpec::Named(OmegaName::Omega0)
    }
}

/// Overrides for the Kähler search; anything left out keeps its default.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_ref: Option<VectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<VectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_step: Option<QuadScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_prime: Option<QuadScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphas: Option<Vec<QuadScalar>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<QuadScalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps_per_scale: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub require_complete: Option<bool>,
}

/// Defaults: standard fibration `f = e1`, `sigma0 = e2 - e1` in the first
/// hyperbolic plane, `omega_J = 2f + sigma0`, `B = 0`, bound 3.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub form: Option<[i64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<VectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<VectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<VectorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<VectorSpec>,
    #[serde(default)]
    pub omega_j: OmegaSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_field: Option<VectorSpec>,
    /// Square-free `m` of the expected field `Q(sqrt m)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u32>,
}

impl ScenarioFile {
    pub fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
    }

    pub fn from_form(form: [i64; 3]) -> Self {
        ScenarioFile {
            form: Some(form),
            p: None,
            q: None,
            f: None,
            sigma0: None,
            omega_j: OmegaSpec::default(),
            b_field: None,
            field: None,
            search: None,
            bound: None,
        }
    }

    pub fn charge(&self) -> Result<Charge, Failure> {
        match (&self.form, &self.p, &self.q) {
            (Some([a, b, c]), None, None) => {
                if a % 2 != 0 || c % 2 != 0 {
                    return Err(Failure::Parse(format!("form [{a}, {b}, {c}] must have even diagonal")));
                }
                // positivity is left to the attractor solve so that D <= 0
                // is reported as a degenerate charge
                Ok(Charge::standard(&BinaryEvenForm { a: *a, b: *b, c: *c }))
            }
            (None, Some(p), Some(q)) => Ok(Charge::new(p.resolve("p")?, q.resolve("q")?)?),
            _ => Err(Failure::Parse("give either form or both p and q".into())),
        }
    }

    pub fn split(&self) -> Result<SplitData, Failure> {
        match (&self.f, &self.sigma0) {
            (None, None) => Ok(SplitData::standard()),
            (Some(f), Some(s)) => Ok(make_split(&f.resolve("f")?, &s.resolve("sigma0")?)?),
            _ => Err(Failure::Parse("f and sigma0 must be given together".into())),
        }
    }

    pub fn b_field(&self) -> Result<LatticeVector, Failure> {
        match &self.b_field {
            None => Ok(LatticeVector::zero(RANK)),
            Some(b) => b.resolve("b_field"),
        }
    }

    pub fn params(&self, base: &Scenario) -> Result<SearchParams, Failure> {
        let mut params = SearchParams::defaults(base)?;
        let Some(s) = &self.search else {
            return Ok(params);
        };
        if let Some(v) = &s.omega_ref {
            params.omega_ref = v.resolve("search.omega_ref")?;
        }
        if let Some(v) = &s.eta {
            params.eta = v.resolve("search.eta")?;
        }
        if let Some(x) = &s.c_step {
            params.c_step = x.clone();
        }
        if let Some(x) = &s.c_prime {
            params.c_prime = x.clone();
        }
        if let Some(x) = &s.alphas {
            params.alphas = x.clone();
        }
        if let Some(x) = &s.beta {
            params.beta = x.clone();
        }
        if let Some(x) = s.max_iter {
            params.max_iter = x;
        }
        if let Some(x) = s.steps_per_scale {
            params.steps_per_scale = x;
        }
        if let Some(x) = s.require_complete {
            params.require_complete = x;
        }
        Ok(params)
    }

    /// The explicit Kähler representative, or `None` when it comes from the search.
    pub fn explicit_omega(&self, split: &SplitData) -> Result<Option<LatticeVector>, Failure> {
        match &self.omega_j {
            OmegaSpec::Named(OmegaName::Omega0) => Ok(Some(omega0(split))),
            OmegaSpec::Named(OmegaName::Search) => Ok(None),
            OmegaSpec::Explicit(v) => v.resolve("omega_j").map(Some),
        }
    }
}

pub fn omega0(split: &SplitData) -> LatticeVector {
    &split.f.scale(&QuadScalar::int(2)) + &split.sigma0
}
