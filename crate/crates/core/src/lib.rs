//! Black-box verification and parameter synthesis for discrete-time
//! continuous-state stochastic systems, driven by a mini-batched
//! hierarchical-optimistic-optimization tree bandit.
//!
//! The pipeline: [`meta::run_meta`] spawns several [`hoo`] optimizer
//! instances over a decreasing smoothness schedule, each growing a
//! [`tree::Tree`] over the search box of an [`model::NmcModel`]; the
//! candidates are then compared by fresh Monte-Carlo estimates
//! ([`eval::mc_estimate`]) and the best one returned.
//!
//! Everything numeric is generic over the scalar type through
//! [`real::Real`]; the `*64` aliases below fix `f64`, which is what the
//! model registry and the command-line front end use.

pub mod benchmarks;
pub mod config;
pub mod eval;
pub mod hoo;
pub mod meta;
pub mod model;
pub mod objective;
pub mod real;
pub mod region;
pub mod riccati;
pub mod rng;
pub mod sweep;
pub mod tree;

pub use config::ConfigError;
pub use eval::{grid_oracle, mc_estimate, EvalError, GridEstimator, McEstimate};
pub use hoo::{
    run_hoo_mb, run_hoo_mb_full, simple_regret, HooError, HooMbConfig, HooMbOutcome, TreeStats,
};
pub use meta::{rho_schedule, run_meta, Candidate, MetaConfig, MetaError, MetaOutcome};
pub use model::{simulate_hit, simulate_reward, Mode, NmcModel, Observation};
pub use objective::{FnObjective, NoisyObjective, SimError};
pub use real::Real;
pub use region::{Region, RegionError};
pub use riccati::{riccati_gain, RiccatiGains};
pub use rng::{RngStream, StreamSeed};
pub use sweep::{budget_sweep, SweepConfig, SweepRow};
pub use tree::{ChildSide, NodeId, NodeLabel, Tree, TreeError, TreeNode};

/// Concrete `f64` instantiations of the main types.
pub type Region64 = region::Region<f64>;
pub type NmcModel64 = model::NmcModel<f64>;
pub type HooMbConfig64 = hoo::HooMbConfig<f64>;
pub type HooMbOutcome64 = hoo::HooMbOutcome<f64>;
pub type MetaConfig64 = meta::MetaConfig<f64>;
pub type MetaOutcome64 = meta::MetaOutcome<f64>;
pub type McEstimate64 = eval::McEstimate<f64>;
pub type SweepConfig64 = sweep::SweepConfig<f64>;
pub type SweepRow64 = sweep::SweepRow<f64>;
pub type Tree64 = tree::Tree<f64>;
