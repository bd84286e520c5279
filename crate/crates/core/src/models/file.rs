//! JSON model definition files.
//!
//! ```json
//! {"type": "qubit",   "E": 10.0, "nu": 1, "prior": {"mean": 0.0, "sigma": 0.1}}
//! {"type": "bosonic", "E": {"epsilon": 0.1, "M": 10}, "nu": 5, "prior": {"sigma": 0.5}}
//! {"type": "generic", "E": {"eigenvalues": [0, 1, 3], "amplitudes": [0.6, 0.0, 0.8]},
//!  "nu": 1, "prior": {"grid": [...], "weights": [...]}}
//! ```
//!
//! Generic amplitudes are real numbers or `[re, im]` pairs. Unknown keys are rejected.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{BoundsError, Result};

use super::phase::PhaseModel;
use super::prior::{GaussianPrior, Prior, TabulatedPrior};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelType {
    Qubit,
    Bosonic,
    Generic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Amplitude {
    Real(f64),
    Complex([f64; 2]),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnergySpec {
    Scalar(f64),
    Bosonic(BosonicSpec),
    Generic(GenericSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BosonicSpec {
    pub epsilon: f64,
    #[serde(rename = "M")]
    pub levels: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenericSpec {
    pub eigenvalues: Vec<f64>,
    pub amplitudes: Vec<Amplitude>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSpec {
    Gaussian(GaussianSpec),
    Tabulated(TabulatedSpec),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianSpec {
    #[serde(default)]
    pub mean: f64,
    pub sigma: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabulatedSpec {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
}

fn one() -> u32 {
    1
}

/// Parsed model file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(rename = "type")]
    pub kind: ModelType,
    #[serde(rename = "E")]
    pub energy: EnergySpec,
    #[serde(default = "one")]
    pub nu: u32,
    pub prior: PriorSpec,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| BoundsError::ModelFile(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| BoundsError::ModelFile(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn phase_model(&self) -> Result<PhaseModel<f64>> {
        match (self.kind, &self.energy) {
            (ModelType::Qubit, EnergySpec::Scalar(e)) => PhaseModel::qubit(*e, self.nu),
            (ModelType::Bosonic, EnergySpec::Bosonic(b)) => PhaseModel::bosonic(b.epsilon, b.levels, self.nu),
            (ModelType::Generic, EnergySpec::Generic(g)) => {
                let amplitudes = g
                    .amplitudes
                    .iter()
                    .map(|a| match *a {
                        Amplitude::Real(re) => Complex::new(re, 0.0),
                        Amplitude::Complex([re, im]) => Complex::new(re, im),
                    })
                    .collect();
                PhaseModel::new(g.eigenvalues.clone(), amplitudes, self.nu)
            }
            (kind, energy) => Err(BoundsError::ModelFile(format!(
                "model type {kind:?} does not accept E = {energy:?}"
            ))),
        }
    }

    pub fn prior(&self) -> Result<Prior<f64>> {
        match &self.prior {
            PriorSpec::Gaussian(g) => Ok(Prior::Gaussian(GaussianPrior::new(g.mean, g.sigma)?)),
            PriorSpec::Tabulated(t) => Ok(Prior::Tabulated(TabulatedPrior::new(
                t.grid.clone(),
                t.weights.clone(),
            )?)),
        }
    }
}
