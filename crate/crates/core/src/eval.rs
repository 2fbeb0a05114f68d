//! Monte-Carlo estimation and the brute-force grid oracle used to
//! cross-check optimizer output on low-dimensional models.

use rayon::prelude::*;
use thiserror::Error;

use crate::model::NmcModel;
use crate::objective::{NoisyObjective, SimError};
use crate::real::Real;
use crate::rng::StreamSeed;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("grid oracle supports at most {max} dimensions, search space has {dim}")]
    DimensionGuard { dim: usize, max: usize },
    #[error("model provides no closed-form mean")]
    NoClosedForm,
    #[error("resolution must be at least 1")]
    ZeroResolution,
    #[error("sample count must be at least 1")]
    ZeroSamples,
    #[error("simulation failed: {0}")]
    Sim(#[from] SimError),
    #[error("inconsistent matrix dimensions: {0}")]
    BadDimensions(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<F: Real> {
    pub mean: F,
    pub sample_count: u64,
    /// Sample standard deviation over the square root of the sample count;
    /// zero for a single sample.
    pub std_error: F,
}

/// Estimate the objective at a point from `samples` independent
/// observations. Deterministic under `seed`.
pub fn mc_estimate<F: Real>(
    objective: &dyn NoisyObjective<F>,
    point: &[F],
    samples: u64,
    seed: StreamSeed,
) -> Result<McEstimate<F>, EvalError> {
    if samples == 0 {
        return Err(EvalError::ZeroSamples);
    }
    let mut rng = seed.rng();
    // Welford keeps the mean exact for constant streams and numerically
    // stable otherwise.
    let mut mean = F::zero();
    let mut m2 = F::zero();
    for i in 1..=samples {
        let y = objective.observe(point, &mut rng)?;
        let n = F::from_u64(i).expect("sample index representable");
        let delta = y - mean;
        mean = mean + delta / n;
        m2 = m2 + delta * (y - mean);
    }
    let std_error = if samples > 1 {
        let n = F::from_u64(samples).expect("sample count representable");
        (m2 / (n - F::one())).sqrt() / n.sqrt()
    } else {
        F::zero()
    };
    Ok(McEstimate { mean, sample_count: samples, std_error })
}

/// How the grid oracle scores a cell midpoint.
#[derive(Debug, Clone, Copy)]
pub enum GridEstimator {
    /// Use the model's closed-form mean (exact; only some models have one).
    ClosedForm,
    /// Estimate with this many Monte-Carlo samples per grid point.
    MonteCarlo { samples: u64 },
}

/// Exhaustive scan over a uniform grid of cell midpoints; returns the argmax
/// point and its value. Guarded to three dimensions. Ties go to the first
/// point in row-major order.
pub fn grid_oracle<F: Real>(
    model: &NmcModel<F>,
    resolution: usize,
    estimator: GridEstimator,
    seed: u64,
) -> Result<(Vec<F>, F), EvalError> {
    const MAX_DIM: usize = 3;
    let space = model.search_space();
    let dim = space.dim();
    if dim > MAX_DIM {
        return Err(EvalError::DimensionGuard { dim, max: MAX_DIM });
    }
    if resolution == 0 {
        return Err(EvalError::ZeroResolution);
    }

    let cells = resolution.pow(dim as u32);
    let res_f = F::from_usize(resolution).expect("resolution representable");
    let point_at = |cell: usize| -> Vec<F> {
        let mut rest = cell;
        (0..dim)
            .map(|d| {
                let idx = rest % resolution;
                rest /= resolution;
                let frac = (F::from_usize(idx).expect("index representable") + F::cast(0.5)) / res_f;
                space.lower()[d] + frac * space.width(d)
            })
            .collect()
    };

    let values: Vec<F> = (0..cells)
        .into_par_iter()
        .map(|cell| -> Result<F, EvalError> {
            let point = point_at(cell);
            match estimator {
                GridEstimator::ClosedForm => {
                    model.exact_mean(&point).ok_or(EvalError::NoClosedForm)
                }
                GridEstimator::MonteCarlo { samples } => {
                    mc_estimate(model, &point, samples, StreamSeed::new(seed, cell as u64))
                        .map(|e| e.mean)
                }
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut best = 0;
    for (cell, value) in values.iter().enumerate() {
        if *value > values[best] {
            best = cell;
        }
    }
    Ok((point_at(best), values[best]))
}
