//! The noisy black-box objective contract consumed by the optimizers.
//!
//! An objective answers point queries with bounded noisy observations whose
//! mean is the (unknown) objective value at the point. All randomness flows
//! through the stream the caller hands in; objectives hold no generator of
//! their own.

use thiserror::Error;

use crate::real::Real;
use crate::rng::RngStream;

/// Simulation / observation failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("non-finite state at step {step}")]
    NonFiniteState { step: usize },
    #[error("non-finite reward")]
    NonFiniteReward,
    #[error("point has {got} dimensions, search space has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the search space")]
    OutOfDomain,
    #[error("operation requires a {expected} model, this model is {actual}")]
    ModeMismatch { expected: &'static str, actual: &'static str },
    #[error("observation {index} of batch: {source}")]
    InBatch { index: usize, source: Box<SimError> },
}

impl SimError {
    /// Tag this failure with its position inside a batch.
    pub fn in_batch(self, index: usize) -> SimError {
        SimError::InBatch { index, source: Box::new(self) }
    }
}

/// A maximizable objective observed through noisy samples.
pub trait NoisyObjective<F: Real>: Send + Sync {
    /// One observation at `point`.
    fn observe(&self, point: &[F], rng: &mut RngStream) -> Result<F, SimError>;

    /// `batch_size` independent observations at the same point, drawn from
    /// consecutive draws of one stream. Failures carry the within-batch index.
    fn observe_batch(
        &self,
        point: &[F],
        batch_size: u64,
        rng: &mut RngStream,
    ) -> Result<Vec<F>, SimError> {
        (0..batch_size)
            .map(|i| self.observe(point, rng).map_err(|e| e.in_batch(i as usize)))
            .collect()
    }
}

/// Adapter turning a plain closure into an objective.
pub struct FnObjective<G>(pub G);

impl<F, G> NoisyObjective<F> for FnObjective<G>
where
    F: Real,
    G: Fn(&[F], &mut RngStream) -> F + Send + Sync,
{
    fn observe(&self, point: &[F], rng: &mut RngStream) -> Result<F, SimError> {
        Ok((self.0)(point, rng))
    }
}
