//! Smoothness-parameter search: run several optimizer instances across a
//! decreasing schedule of depth-decay factors, then pick the candidate with
//! the best fresh Monte-Carlo estimate.
//!
//! Instances are independent (seeded by instance index, not execution order)
//! and run in parallel on the current thread pool.

use rayon::prelude::*;
use thiserror::Error;

use crate::config::ConfigError;
use crate::eval::{mc_estimate, EvalError};
use crate::hoo::{run_hoo_mb, HooError, HooMbConfig, QueryRule, TreeStats};
use crate::objective::NoisyObjective;
use crate::real::Real;
use crate::region::Region;
use crate::rng::StreamSeed;

#[derive(Debug, Error)]
pub enum MetaError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("instance {instance} failed: {source}")]
    Instance { instance: usize, source: HooError },
    #[error("evaluation of candidate {instance} failed: {source}")]
    Eval { instance: usize, source: EvalError },
}

/// Knobs of the full pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct MetaConfig<F: Real> {
    /// Optimizer budget `N`, split evenly across instances.
    pub total_budget: u64,
    /// Number of parallel instances `K`.
    pub instances: usize,
    pub nu_max: F,
    pub rho_max: F,
    pub sigma: F,
    pub batch_size: u64,
    /// Fresh Monte-Carlo samples per candidate in the selection stage.
    pub eval_samples: u64,
    pub seed: u64,
    pub query: QueryRule,
}

impl<F: Real> MetaConfig<F> {
    /// Defaults: 4 instances, `nu_max` 1, `rho_max` 0.6, `sigma` 0.5, batches
    /// of 100, 500 evaluation samples.
    pub fn new(total_budget: u64) -> Self {
        Self {
            total_budget,
            instances: 4,
            nu_max: F::one(),
            rho_max: F::cast(0.6),
            sigma: F::cast(0.5),
            batch_size: 100,
            eval_samples: 500,
            seed: 0,
            query: QueryRule::default(),
        }
    }

    pub fn per_instance_budget(&self) -> u64 {
        self.total_budget / self.instances as u64
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.instances == 0 {
            return Err(ConfigError::NoInstances);
        }
        if self.eval_samples == 0 {
            return Err(ConfigError::NoEvalSamples);
        }
        if self.batch_size == 0 {
            return Err(ConfigError::ZeroBatch);
        }
        if !(self.sigma > F::zero()) {
            return Err(ConfigError::NonPositive { name: "sigma" });
        }
        if !(self.nu_max > F::zero()) {
            return Err(ConfigError::NonPositive { name: "nu_max" });
        }
        if !(self.rho_max > F::zero() && self.rho_max < F::one()) {
            return Err(ConfigError::NotInUnitInterval { name: "rho_max" });
        }
        if self.per_instance_budget() < self.batch_size {
            return Err(ConfigError::InstanceBudgetTooSmall {
                per_instance: self.per_instance_budget(),
                batch_size: self.batch_size,
            });
        }
        Ok(())
    }
}

/// One instance's result after evaluation.
#[derive(Debug, Clone)]
pub struct Candidate<F: Real> {
    /// Instance index, 1-based.
    pub instance: usize,
    /// Depth-decay factor this instance ran with.
    pub rho: F,
    pub point: Vec<F>,
    /// Monte-Carlo estimate of the objective at `point`.
    pub estimate: F,
    pub tree_stats: TreeStats,
    pub queries_used: u64,
}

#[derive(Debug, Clone)]
pub struct MetaOutcome<F: Real> {
    /// All instance candidates, in instance order.
    pub candidates: Vec<Candidate<F>>,
    pub best_point: Vec<F>,
    pub best_estimate: F,
    /// Optimizer queries plus evaluation queries.
    pub total_queries: u64,
    /// Budget remainder `N mod K`, never consumed.
    pub unspent_budget: u64,
}

/// Depth-decay schedule `rho_max^(K / (K - i + 1))` for `i = 1..=K`:
/// starts at `rho_max` and decreases to `rho_max^K`.
pub fn rho_schedule<F: Real>(rho_max: F, instances: usize) -> Result<Vec<F>, ConfigError> {
    if instances == 0 {
        return Err(ConfigError::NoInstances);
    }
    if !(rho_max > F::zero() && rho_max < F::one()) {
        return Err(ConfigError::NotInUnitInterval { name: "rho_max" });
    }
    let k = F::from_usize(instances).expect("instance count representable");
    Ok((1..=instances)
        .map(|i| {
            let denom = F::from_usize(instances - i + 1).expect("index representable");
            rho_max.powf(k / denom)
        })
        .collect())
}

/// Run the full pipeline: `K` optimizer instances with budget `N / K` each,
/// then Monte-Carlo evaluation of the `K` candidate points, returning the
/// argmax (ties toward the lower instance index).
pub fn run_meta<F: Real>(
    objective: &dyn NoisyObjective<F>,
    domain: &Region<F>,
    cfg: &MetaConfig<F>,
) -> Result<MetaOutcome<F>, MetaError> {
    cfg.validate()?;
    let k = cfg.instances;
    let schedule = rho_schedule(cfg.rho_max, k)?;
    let per_instance = cfg.per_instance_budget();

    let instance_cfgs: Vec<(usize, HooMbConfig<F>)> = schedule
        .iter()
        .enumerate()
        .map(|(idx, rho)| {
            let instance = idx + 1;
            (
                instance,
                HooMbConfig {
                    budget: per_instance,
                    batch_size: cfg.batch_size,
                    sigma: cfg.sigma,
                    nu: cfg.nu_max,
                    rho: *rho,
                    seed: StreamSeed::new(cfg.seed, instance as u64),
                    query: cfg.query,
                },
            )
        })
        .collect();

    let outcomes = instance_cfgs
        .par_iter()
        .map(|(instance, icfg)| {
            run_hoo_mb(objective, domain, icfg)
                .map_err(|source| MetaError::Instance { instance: *instance, source })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let candidates = outcomes
        .par_iter()
        .zip(&instance_cfgs)
        .map(|(outcome, (instance, icfg))| {
            let eval_seed = StreamSeed::new(cfg.seed, (k + instance) as u64);
            let estimate =
                mc_estimate(objective, &outcome.best_point, cfg.eval_samples, eval_seed)
                    .map_err(|source| MetaError::Eval { instance: *instance, source })?;
            Ok(Candidate {
                instance: *instance,
                rho: icfg.rho,
                point: outcome.best_point.clone(),
                estimate: estimate.mean,
                tree_stats: outcome.tree_stats,
                queries_used: outcome.queries_used,
            })
        })
        .collect::<Result<Vec<_>, MetaError>>()?;

    let mut best = 0;
    for (i, c) in candidates.iter().enumerate() {
        if c.estimate > candidates[best].estimate {
            best = i;
        }
    }

    let optimizer_queries: u64 = candidates.iter().map(|c| c.queries_used).sum();
    Ok(MetaOutcome {
        best_point: candidates[best].point.clone(),
        best_estimate: candidates[best].estimate,
        total_queries: optimizer_queries + k as u64 * cfg.eval_samples,
        unspent_budget: cfg.total_budget - per_instance * k as u64,
        candidates,
    })
}
