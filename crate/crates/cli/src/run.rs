//! Run configuration (flag and file forms), execution, and the structured
//! result document.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use hoover_core::benchmarks::{build_model, ModelParams};
use hoover_core::hoo::QueryRule;
use hoover_core::{budget_sweep, run_meta, MetaConfig64, Mode, NmcModel64, SweepConfig64};

use crate::error::CliError;

fn default_batch_size() -> u64 {
    100
}
fn default_rho_max() -> f64 {
    0.6
}
fn default_nu_max() -> f64 {
    1.0
}
fn default_sigma() -> f64 {
    0.5
}
fn default_instances() -> usize {
    4
}
fn default_eval_samples() -> u64 {
    500
}

/// One run, as written in a config file. The flag form of a run canonicalizes
/// into this same structure, so both forms produce identical results.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    /// "verify" or "synthesize"; optional in files, implied by the
    /// subcommand.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub model: String,
    #[serde(default)]
    pub model_params: BTreeMap<String, f64>,
    pub total_budget: u64,
    #[serde(default = "default_batch_size")]
    pub batch_size: u64,
    #[serde(default = "default_sigma")]
    pub sigma: f64,
    #[serde(default = "default_nu_max")]
    pub nu_max: f64,
    #[serde(default = "default_rho_max")]
    pub rho_max: f64,
    #[serde(default = "default_instances")]
    pub instances: usize,
    #[serde(default = "default_eval_samples")]
    pub eval_samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_bound: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl RunConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("config {}: {e}", path.display())))
    }

    pub fn meta_config(&self) -> MetaConfig64 {
        MetaConfig64 {
            total_budget: self.total_budget,
            instances: self.instances,
            nu_max: self.nu_max,
            rho_max: self.rho_max,
            sigma: self.sigma,
            batch_size: self.batch_size,
            eval_samples: self.eval_samples,
            seed: self.seed,
            query: QueryRule::default(),
        }
    }

    pub fn build_model(&self) -> Result<NmcModel64, CliError> {
        let params: ModelParams = self.model_params.clone();
        Ok(build_model(&self.model, self.time_bound, &params)?)
    }

    /// Check the subcommand's mode against the model and any mode key in the
    /// file.
    pub fn check_mode(&self, expected: Mode, model: &NmcModel64) -> Result<(), CliError> {
        if let Some(declared) = &self.mode {
            let canonical = match expected {
                Mode::Verification => "verify",
                Mode::Synthesis => "synthesize",
            };
            if declared != canonical {
                return Err(CliError::Config(format!(
                    "config file declares mode '{declared}', subcommand expects '{canonical}'"
                )));
            }
        }
        if model.mode() != expected {
            return Err(CliError::Config(format!(
                "model '{}' is a {} model, not usable with this subcommand",
                self.model,
                model.mode().name()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateRecord {
    pub instance: usize,
    pub rho: f64,
    pub point: Vec<f64>,
    pub estimate: f64,
    pub tree_nodes: usize,
    pub tree_max_depth: u32,
    pub queries_used: u64,
}

/// The structured result document. `wall_time_s` stays last so everything
/// above it is reproducible byte for byte.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunResult {
    pub config: RunConfigFile,
    pub candidates: Vec<CandidateRecord>,
    pub best_point: Vec<f64>,
    pub best_estimate: f64,
    pub total_queries: u64,
    pub unspent_budget: u64,
    pub clamp_events: u64,
    pub wall_time_s: f64,
}

pub fn execute_run(config: &RunConfigFile, expected_mode: Mode) -> Result<RunResult, CliError> {
    let started = Instant::now();
    let model = config.build_model()?;
    config.check_mode(expected_mode, &model)?;
    let domain = model.search_space();
    let outcome = run_meta(&model, &domain, &config.meta_config())?;

    let candidates = outcome
        .candidates
        .iter()
        .map(|c| CandidateRecord {
            instance: c.instance,
            rho: c.rho,
            point: c.point.clone(),
            estimate: c.estimate,
            tree_nodes: c.tree_stats.nodes,
            tree_max_depth: c.tree_stats.max_depth,
            queries_used: c.queries_used,
        })
        .collect();

    Ok(RunResult {
        config: config.clone(),
        candidates,
        best_point: outcome.best_point,
        best_estimate: outcome.best_estimate,
        total_queries: outcome.total_queries,
        unspent_budget: outcome.unspent_budget,
        clamp_events: model.clamp_events(),
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

pub fn write_result(result: &RunResult, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(result)
        .map_err(|e| CliError::Io(format!("cannot serialize result: {e}")))?;
    fs::write(path, text + "\n")
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Run the sweep and render the delimited table.
pub fn execute_sweep(
    config: &RunConfigFile,
    budgets: &[u64],
    repeats: u64,
) -> Result<String, CliError> {
    let model = config.build_model()?;
    let domain = model.search_space();
    let sweep = SweepConfig64 {
        budgets: budgets.to_vec(),
        repeats,
        base: config.meta_config(),
    };
    let rows = budget_sweep(&model, &domain, &sweep)?;
    let mut table = String::from("budget,median,q25,q75,nodes,queries_used,wall_time_s\n");
    for row in rows {
        table.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.budget, row.median, row.q25, row.q75, row.nodes, row.queries_used, row.wall_time_s
        ));
    }
    Ok(table)
}
