//! Concrete models and the name registry the CLI builds them through.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::NmcModel;

mod lqr;
mod random_motion;
mod sharp;
mod sl_platoon;

pub use lqr::{Lqr, LqrParams, Mat2};
pub use random_motion::RandomMotion;
pub use sharp::Sharp;
pub use sl_platoon::{ActionProbs, SlPlatoon, SlPlatoonParams};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown model '{name}' (known: {known})", known = REGISTERED.join(", "))]
    Unknown { name: String },
    #[error("model '{name}' is reserved but not provided by this registry")]
    Reserved { name: String },
    #[error("unknown parameter '{key}' for model '{model}'")]
    UnknownParam { model: &'static str, key: String },
    #[error("invalid parameter '{key}' for model '{model}': {reason}")]
    BadParam { model: &'static str, key: &'static str, reason: String },
}

/// Model parameter block: numeric values keyed by name.
pub type ModelParams = BTreeMap<String, f64>;

/// Models this registry can build.
pub const REGISTERED: [&str; 4] = ["random-motion", "sharp", "sl-platoon", "lqr"];

/// Names reserved for models this registry does not provide.
pub const RESERVED: [&str; 3] = ["ml-platoon", "merging", "detect-brake"];

struct ParamReader<'a> {
    model: &'static str,
    params: &'a ModelParams,
    known: &'static [&'static str],
}

impl<'a> ParamReader<'a> {
    fn new(
        model: &'static str,
        params: &'a ModelParams,
        known: &'static [&'static str],
    ) -> Result<Self, ModelError> {
        if let Some(key) = params.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(ModelError::UnknownParam { model, key: key.clone() });
        }
        Ok(Self { model, params, known })
    }

    fn real(&self, key: &'static str, default: f64) -> f64 {
        debug_assert!(self.known.contains(&key));
        self.params.get(key).copied().unwrap_or(default)
    }

    fn integer(&self, key: &'static str, default: usize) -> Result<usize, ModelError> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) if v.fract() == 0.0 && *v >= 0.0 && *v <= 1e9 => Ok(*v as usize),
            Some(_) => Err(ModelError::BadParam {
                model: self.model,
                key,
                reason: "must be a non-negative integer".into(),
            }),
        }
    }
}

/// Build a registered model. `time_bound` is the run length `k`; when absent
/// each model falls back to its own default (the quadratic-regulator model
/// uses its horizon as `k`).
pub fn build_model(
    name: &str,
    time_bound: Option<usize>,
    params: &ModelParams,
) -> Result<NmcModel<f64>, ModelError> {
    match name {
        "random-motion" => {
            let p = ParamReader::new("random-motion", params, &["step_sigma", "radius"])?;
            let model = RandomMotion::new(
                p.real("step_sigma", 0.1),
                p.real("radius", 4.0),
                time_bound.unwrap_or(5),
            )?;
            Ok(NmcModel::verification(model))
        }
        "sharp" => {
            let p = ParamReader::new("sharp", params, &["s", "p_max"])?;
            let model = Sharp::new(p.real("s", 0.1), p.real("p_max", 0.3), time_bound.unwrap_or(1))?;
            Ok(NmcModel::verification(model))
        }
        "sl-platoon" => {
            let p = ParamReader::new("sl-platoon", params, &["num_cars"])?;
            let num_cars = p.integer("num_cars", 3)?;
            let model = SlPlatoon::with_defaults(num_cars, time_bound.unwrap_or(10))?;
            Ok(NmcModel::verification(model))
        }
        "lqr" => {
            let p = ParamReader::new("lqr", params, &["horizon", "noise_sigma"])?;
            let horizon = p.integer("horizon", time_bound.unwrap_or(20))?;
            let model = Lqr::with_defaults(horizon, p.real("noise_sigma", 0.01))?;
            Ok(NmcModel::synthesis(model))
        }
        other if RESERVED.contains(&other) => Err(ModelError::Reserved { name: other.into() }),
        other => Err(ModelError::Unknown { name: other.into() }),
    }
}
