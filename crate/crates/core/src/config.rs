//! Configuration validation errors shared by the optimizer layers.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("budget {budget} is smaller than batch size {batch_size}")]
    BudgetBelowBatch { budget: u64, batch_size: u64 },
    #[error("{name} must be strictly positive")]
    NonPositive { name: &'static str },
    #[error("{name} must lie strictly inside (0, 1)")]
    NotInUnitInterval { name: &'static str },
    #[error("batch size must be at least 1")]
    ZeroBatch,
    #[error("instance count must be at least 1")]
    NoInstances,
    #[error("evaluation sample count must be at least 1")]
    NoEvalSamples,
    #[error("per-instance budget {per_instance} cannot fit one batch of {batch_size}")]
    InstanceBudgetTooSmall { per_instance: u64, batch_size: u64 },
    #[error("budget list must be non-empty and strictly increasing")]
    BadBudgetList,
    #[error("repeat count must be at least 1")]
    NoRepeats,
}
