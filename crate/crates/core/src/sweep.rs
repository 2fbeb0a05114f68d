//! Budget sweeps: the measurement harness behind the convergence tables.

use std::time::Instant;

use rayon::prelude::*;

use crate::config::ConfigError;
use crate::meta::{run_meta, MetaConfig, MetaError};
use crate::objective::NoisyObjective;
use crate::real::Real;
use crate::region::Region;

/// A sweep runs the full pipeline once per `(budget, repeat)` pair. Repeat
/// `r` uses master seed `base.seed + r`, so the same seeds are paired across
/// budgets.
#[derive(Debug, Clone)]
pub struct SweepConfig<F: Real> {
    /// Strictly increasing budgets.
    pub budgets: Vec<u64>,
    pub repeats: u64,
    /// Template for every run; `total_budget` is overridden per row.
    pub base: MetaConfig<F>,
}

impl<F: Real> SweepConfig<F> {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.budgets.is_empty() || self.budgets.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ConfigError::BadBudgetList);
        }
        if self.repeats == 0 {
            return Err(ConfigError::NoRepeats);
        }
        Ok(())
    }
}

/// One aggregated row per budget.
#[derive(Debug, Clone)]
pub struct SweepRow<F: Real> {
    pub budget: u64,
    /// Median best estimate across repeats.
    pub median: F,
    pub q25: F,
    pub q75: F,
    /// Per-instance node count (identical for every instance of a row).
    pub nodes: usize,
    /// Total queries of one run at this budget.
    pub queries_used: u64,
    pub wall_time_s: f64,
}

/// Quantile by linear interpolation between closest ranks; `sorted` must be
/// ascending and non-empty.
fn quantile<F: Real>(sorted: &[F], q: f64) -> F {
    let last = sorted.len() - 1;
    let pos = q * last as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = F::cast(pos - lo as f64);
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Run the pipeline for every `(budget, repeat)` pair and aggregate medians
/// and quartiles per budget. Repeats of one row run in parallel.
pub fn budget_sweep<F: Real>(
    objective: &dyn NoisyObjective<F>,
    domain: &Region<F>,
    cfg: &SweepConfig<F>,
) -> Result<Vec<SweepRow<F>>, MetaError> {
    cfg.validate()?;
    let mut rows = Vec::with_capacity(cfg.budgets.len());
    for &budget in &cfg.budgets {
        let started = Instant::now();
        let outcomes = (0..cfg.repeats)
            .into_par_iter()
            .map(|repeat| {
                let mut run_cfg = cfg.base.clone();
                run_cfg.total_budget = budget;
                run_cfg.seed = cfg.base.seed + repeat;
                run_meta(objective, domain, &run_cfg)
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut estimates: Vec<F> = outcomes.iter().map(|o| o.best_estimate).collect();
        estimates.sort_by(|a, b| a.partial_cmp(b).expect("estimates are finite"));
        rows.push(SweepRow {
            budget,
            median: quantile(&estimates, 0.5),
            q25: quantile(&estimates, 0.25),
            q75: quantile(&estimates, 0.75),
            nodes: outcomes[0].candidates[0].tree_stats.nodes,
            queries_used: outcomes[0].total_queries,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::FnObjective;
    use crate::rng::RngStream;

    #[test]
    fn quantiles_interpolate_between_ranks() {
        let v = [1.0f64, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.25), 1.75);
        assert_eq!(quantile(&v, 0.75), 3.25);
        assert_eq!(quantile(&[7.0f64], 0.5), 7.0);
    }

    #[test]
    fn single_cell_sweep_equals_the_single_run() {
        let obj = FnObjective(|x: &[f64], _: &mut RngStream| 1.0 - x[0] * x[0]);
        let domain = Region::unit(1);
        let mut base = MetaConfig::<f64>::new(0);
        base.batch_size = 10;
        let cfg = SweepConfig { budgets: vec![400], repeats: 1, base: base.clone() };
        let rows = budget_sweep(&obj, &domain, &cfg).unwrap();
        assert_eq!(rows.len(), 1);

        base.total_budget = 400;
        let single = run_meta(&obj, &domain, &base).unwrap();
        assert_eq!(rows[0].median, single.best_estimate);
        assert_eq!(rows[0].queries_used, single.total_queries);
        // floor((100 - 1) / 10) + 2 nodes per instance.
        assert_eq!(rows[0].nodes, 11);
    }

    #[test]
    fn node_counts_follow_the_accounting_identity() {
        let obj = FnObjective(|x: &[f64], _: &mut RngStream| x[0]);
        let domain = Region::unit(1);
        let mut base = MetaConfig::<f64>::new(0);
        base.batch_size = 25;
        let cfg = SweepConfig { budgets: vec![1000, 2000, 4100], repeats: 2, base };
        let rows = budget_sweep(&obj, &domain, &cfg).unwrap();
        for row in &rows {
            let per_instance = row.budget / 4;
            let expected = (per_instance - 1) / 25 + 2;
            assert_eq!(row.nodes as u64, expected, "budget {}", row.budget);
        }
    }

    #[test]
    fn bad_budget_lists_are_rejected() {
        let base = MetaConfig::<f64>::new(0);
        for budgets in [vec![], vec![100, 100], vec![200, 100]] {
            let cfg = SweepConfig { budgets, repeats: 1, base: base.clone() };
            assert!(matches!(cfg.validate(), Err(ConfigError::BadBudgetList)));
        }
        let cfg = SweepConfig { budgets: vec![100], repeats: 0, base };
        assert!(matches!(cfg.validate(), Err(ConfigError::NoRepeats)));
    }
}
