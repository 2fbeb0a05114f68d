//! The mini-batched optimistic-optimization loop.
//!
//! Repeats until the sampling budget is spent: walk the tree toward the most
//! optimistic bound, grow one leaf, draw a point uniformly from the new
//! leaf's cell, observe it `batch_size` times, fold the batch into the path
//! statistics, and back every bound up from the leaves. The answer is the
//! midpoint of the best-bounded cell at the deepest inserted level.

use std::io::Write;

use thiserror::Error;

use crate::config::ConfigError;
use crate::objective::{NoisyObjective, SimError};
use crate::real::Real;
use crate::region::Region;
use crate::rng::StreamSeed;
use crate::tree::{NodeLabel, Tree, TreeError};

#[derive(Debug, Error)]
pub enum HooError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("objective failed in batch {batch}: {source}")]
    Objective { batch: u64, source: SimError },
    #[error("tree operation failed: {0}")]
    Tree(#[from] TreeError),
    #[error("trace writer failed: {0}")]
    Trace(#[from] std::io::Error),
}

/// How the point queried for a freshly grown cell is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QueryRule {
    /// Deterministic cell midpoint: reproducible and self-consistent with
    /// the returned point, which is also the cell midpoint.
    #[default]
    Midpoint,
    /// Uniform draw inside the cell, from the instance stream. Useful at
    /// large batch sizes when the optimum sits on a bisection seam, where
    /// midpoints carry no signal.
    UniformInCell,
}

/// Knobs of a single optimizer instance.
#[derive(Debug, Clone, PartialEq)]
pub struct HooMbConfig<F: Real> {
    /// Simulator-call budget `N`.
    pub budget: u64,
    /// Observations per chosen cell.
    pub batch_size: u64,
    /// Sub-Gaussian scale of the observation noise.
    pub sigma: F,
    /// Smoothness level.
    pub nu: F,
    /// Smoothness decay per depth, in (0, 1).
    pub rho: F,
    pub seed: StreamSeed,
    pub query: QueryRule,
}

impl<F: Real> HooMbConfig<F> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.batch_size == 0 {
            return Err(ConfigError::ZeroBatch);
        }
        if self.budget < self.batch_size {
            return Err(ConfigError::BudgetBelowBatch {
                budget: self.budget,
                batch_size: self.batch_size,
            });
        }
        if !(self.sigma > F::zero()) {
            return Err(ConfigError::NonPositive { name: "sigma" });
        }
        if !(self.nu > F::zero()) {
            return Err(ConfigError::NonPositive { name: "nu" });
        }
        if !(self.rho > F::zero() && self.rho < F::one()) {
            return Err(ConfigError::NotInUnitInterval { name: "rho" });
        }
        Ok(())
    }

    /// Completed batches for this budget: `floor((N - 1) / b) + 1`.
    pub fn batches(&self) -> u64 {
        (self.budget - 1) / self.batch_size + 1
    }
}

/// Size and accounting summary of a finished tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeStats {
    pub nodes: usize,
    pub max_depth: u32,
    pub batches: u64,
}

#[derive(Debug, Clone)]
pub struct HooMbOutcome<F: Real> {
    /// Midpoint of the winning cell.
    pub best_point: Vec<F>,
    pub best_node_label: NodeLabel,
    pub tree_stats: TreeStats,
    /// Simulator calls actually consumed; exceeds the budget by at most
    /// `batch_size - 1`.
    pub queries_used: u64,
}

/// Run the optimizer and drop the tree.
pub fn run_hoo_mb<F: Real>(
    objective: &dyn NoisyObjective<F>,
    domain: &Region<F>,
    cfg: &HooMbConfig<F>,
) -> Result<HooMbOutcome<F>, HooError> {
    run_hoo_mb_full(objective, domain, cfg, None).map(|(outcome, _)| outcome)
}

/// Run the optimizer and keep the final tree. When `trace` is given, one
/// structured line is written per batch.
pub fn run_hoo_mb_full<F: Real>(
    objective: &dyn NoisyObjective<F>,
    domain: &Region<F>,
    cfg: &HooMbConfig<F>,
    mut trace: Option<&mut dyn Write>,
) -> Result<(HooMbOutcome<F>, Tree<F>), HooError> {
    cfg.validate()?;
    let b = cfg.batch_size;
    let mut rng = cfg.seed.rng();
    let mut tree = Tree::new(domain.clone());

    for batch in 1..=cfg.batches() {
        let walk = tree.traverse();
        let leaf = tree.insert_child(walk.parent, walk.side)?;
        let point = match cfg.query {
            QueryRule::UniformInCell => tree.node(leaf).region().sample_uniform(&mut rng),
            QueryRule::Midpoint => tree.node(leaf).region().midpoint(),
        };
        let observations = objective
            .observe_batch(&point, b, &mut rng)
            .map_err(|source| HooError::Objective { batch, source })?;

        let mut path = walk.path;
        path.push(leaf);
        tree.update_path(&path, &observations, b)?;
        tree.complete_batch(b);
        tree.backup_all(cfg.sigma, cfg.nu, cfg.rho, b);

        if let Some(out) = trace.as_deref_mut() {
            let mean: F = observations.iter().copied().sum::<F>()
                / F::from_u64(b).expect("batch size representable");
            let coords: Vec<String> = point.iter().map(|x| x.to_string()).collect();
            writeln!(
                out,
                "{{\"batch\":{},\"node\":\"{}\",\"point\":[{}],\"batch_mean\":{},\"max_depth\":{}}}",
                batch,
                tree.label(leaf),
                coords.join(","),
                mean,
                tree.max_depth(),
            )?;
        }
    }

    let best = tree.best_at_max_depth();
    let outcome = HooMbOutcome {
        best_point: tree.node(best).region().midpoint(),
        best_node_label: tree.label(best),
        tree_stats: TreeStats {
            nodes: tree.node_count(),
            max_depth: tree.max_depth(),
            batches: tree.batch_count(),
        },
        queries_used: tree.query_count(),
    };
    Ok((outcome, tree))
}

/// Gap between the true optimum and the value achieved at the returned point.
pub fn simple_regret<F: Real>(true_optimum: F, achieved: F) -> F {
    true_optimum - achieved
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;
    use crate::rng::RngStream;

    fn constant(value: f64) -> FnObjective<impl Fn(&[f64], &mut RngStream) -> f64 + Send + Sync> {
        FnObjective(move |_: &[f64], _: &mut RngStream| value)
    }

    fn cfg(budget: u64, batch_size: u64, seed: u64) -> HooMbConfig<f64> {
        HooMbConfig {
            budget,
            batch_size,
            sigma: 0.5,
            nu: 1.0,
            rho: 0.5,
            seed: StreamSeed::new(seed, 0),
            query: QueryRule::default(),
        }
    }

    #[test]
    fn budget_accounting_rounds_up_to_whole_batches() {
        let (outcome, tree) =
            run_hoo_mb_full(&constant(0.3), &Region::unit(2), &cfg(10, 3, 1), None).unwrap();
        assert_eq!(outcome.tree_stats.batches, 4);
        assert_eq!(outcome.queries_used, 12);
        assert_eq!(outcome.tree_stats.nodes, 5);
        assert_eq!(tree.node_count() as u64, tree.batch_count() + 1);
    }

    #[test]
    fn constant_objective_has_zero_regret() {
        let outcome = run_hoo_mb(&constant(0.3), &Region::unit(2), &cfg(200, 5, 7)).unwrap();
        // Every point of a constant function is optimal.
        assert_eq!(simple_regret(0.3, 0.3), 0.0);
        assert!(Region::<f64>::unit(2).contains(&outcome.best_point));
    }

    #[test]
    fn regret_examples() {
        assert_eq!(simple_regret(0.3, 0.3), 0.0);
        assert_eq!(simple_regret(1.0, 0.75), 0.25);
    }

    #[test]
    fn budget_below_batch_size_is_rejected() {
        let err = run_hoo_mb(&constant(0.0), &Region::unit(1), &cfg(5, 10, 0)).unwrap_err();
        assert!(matches!(
            err,
            HooError::Config(ConfigError::BudgetBelowBatch { budget: 5, batch_size: 10 })
        ));
    }

    #[test]
    fn invalid_smoothness_is_rejected() {
        let mut c = cfg(100, 10, 0);
        c.rho = 1.0;
        assert!(matches!(
            c.validate(),
            Err(ConfigError::NotInUnitInterval { name: "rho" })
        ));
        let mut c = cfg(100, 10, 0);
        c.sigma = 0.0;
        assert!(matches!(c.validate(), Err(ConfigError::NonPositive { name: "sigma" })));
    }

    #[test]
    fn identical_seeds_give_bit_identical_trees() {
        let noisy = FnObjective(|x: &[f64], rng: &mut RngStream| {
            x[0] + 0.1 * f64::std_normal(rng)
        });
        let domain = Region::unit(1);
        let (a, tree_a) = run_hoo_mb_full(&noisy, &domain, &cfg(300, 10, 42), None).unwrap();
        let (b, tree_b) = run_hoo_mb_full(&noisy, &domain, &cfg(300, 10, 42), None).unwrap();
        assert_eq!(a.best_point, b.best_point);
        assert_eq!(a.best_node_label, b.best_node_label);
        let mut dump_a = Vec::new();
        let mut dump_b = Vec::new();
        tree_a.dump(&mut dump_a).unwrap();
        tree_b.dump(&mut dump_b).unwrap();
        assert_eq!(dump_a, dump_b);
    }

    #[test]
    fn objective_failures_carry_the_batch_index() {
        struct FailSecondBatch;
        impl NoisyObjective<f64> for FailSecondBatch {
            fn observe(&self, point: &[f64], _: &mut RngStream) -> Result<f64, SimError> {
                // The second batch queries a point away from the first split's
                // left half midpoint draw; fail on any point in [0.5, 1].
                if point[0] >= 0.5 {
                    Err(SimError::NonFiniteReward)
                } else {
                    Ok(0.0)
                }
            }
        }
        let err = run_hoo_mb(&FailSecondBatch, &Region::unit(1), &cfg(40, 10, 3)).unwrap_err();
        match err {
            HooError::Objective { batch, .. } => assert!(batch >= 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn trace_emits_one_line_per_batch() {
        let mut buf = Vec::new();
        run_hoo_mb_full(
            &constant(0.5),
            &Region::unit(2),
            &cfg(40, 10, 9),
            Some(&mut buf),
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().next().unwrap().starts_with("{\"batch\":1,\"node\":\"(1, 1)\""));
    }
}
