//! Error-to-exit-code mapping.
//!
//! Codes: 2 unknown model, 3 invalid configuration, 4 parse errors (flags,
//! lists, config files), 5 point outside the search space, 6 I/O failures,
//! 1 anything else.

use std::fmt;

use hoover_core::benchmarks::ModelError;
use hoover_core::{ConfigError, EvalError, HooError, MetaError, SimError};

#[derive(Debug)]
pub enum CliError {
    UnknownModel(String),
    Config(String),
    Parse(String),
    Domain(String),
    Io(String),
    Run(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnknownModel(_) => 2,
            CliError::Config(_) => 3,
            CliError::Parse(_) => 4,
            CliError::Domain(_) => 5,
            CliError::Io(_) => 6,
            CliError::Run(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::UnknownModel(m) => write!(f, "{m}"),
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Domain(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Run(m) => write!(f, "{m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Unknown { .. } | ModelError::Reserved { .. } => {
                CliError::UnknownModel(e.to_string())
            }
            ModelError::UnknownParam { .. } | ModelError::BadParam { .. } => {
                CliError::Config(e.to_string())
            }
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<MetaError> for CliError {
    fn from(e: MetaError) -> Self {
        match e {
            MetaError::Config(c) => CliError::Config(c.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<HooError> for CliError {
    fn from(e: HooError) -> Self {
        match e {
            HooError::Config(c) => CliError::Config(c.to_string()),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Sim(s) => CliError::from(s),
            other => CliError::Run(other.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::OutOfDomain | SimError::DimensionMismatch { .. } => {
                CliError::Domain(e.to_string())
            }
            other => CliError::Run(other.to_string()),
        }
    }
}
