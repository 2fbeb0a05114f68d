//! `hoover`: worst-case verification and parameter synthesis for black-box
//! simulators, from the command line.

mod error;
mod run;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hoover_core::benchmarks::build_model;
use hoover_core::{mc_estimate, Mode, StreamSeed};

use error::CliError;
use run::{execute_run, execute_sweep, write_result, RunConfigFile};

const EXIT_PARSE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "hoover", version, about = "Tree-bandit verification and synthesis engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Maximize the hitting probability of a verification model over its
    /// initial-state box.
    Verify(RunArgs),
    /// Maximize the expected reward of a synthesis model over its parameter
    /// box.
    Synthesize(RunArgs),
    /// Repeat runs over a list of budgets and tabulate the medians.
    Sweep(SweepArgs),
    /// Probe the observation mean of a model at one point.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Registered model name.
    #[arg(long, required_unless_present = "config", conflicts_with = "config")]
    model: Option<String>,

    /// Model parameter, as key=value; repeatable.
    #[arg(long = "model-param", value_name = "KEY=VALUE", conflicts_with = "config")]
    model_param: Vec<String>,

    /// Total simulator-call budget for the optimizer.
    #[arg(long, conflicts_with = "config")]
    budget: Option<u64>,

    /// Observations per chosen cell.
    #[arg(long, default_value_t = 100, conflicts_with = "config")]
    batch_size: u64,

    /// Largest smoothness decay factor of the instance schedule.
    #[arg(long, default_value_t = 0.6, conflicts_with = "config")]
    rho_max: f64,

    /// Smoothness level shared by all instances.
    #[arg(long, default_value_t = 1.0, conflicts_with = "config")]
    nu_max: f64,

    /// Sub-Gaussian noise scale assumed by the optimizer.
    #[arg(long, default_value_t = 0.5, conflicts_with = "config")]
    sigma: f64,

    /// Number of optimizer instances.
    #[arg(long, default_value_t = 4, conflicts_with = "config")]
    instances: usize,

    /// Monte-Carlo samples per candidate in the final selection.
    #[arg(long, default_value_t = 500, conflicts_with = "config")]
    eval_samples: u64,

    /// Master random seed.
    #[arg(long, default_value_t = 0, conflicts_with = "config")]
    seed: u64,

    /// Steps per simulated run (model-specific default when omitted).
    #[arg(long, conflicts_with = "config")]
    time_bound: Option<usize>,

    /// Where to write the structured result document.
    #[arg(long, conflicts_with = "config")]
    output: Option<PathBuf>,

    /// JSON file carrying all of the above keys instead of flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Comma-separated, strictly increasing budgets.
    #[arg(long)]
    budgets: String,

    /// Runs per budget.
    #[arg(long, default_value_t = 1)]
    repeats: u64,

    #[command(flatten)]
    run: RunArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    model: String,

    #[arg(long = "model-param", value_name = "KEY=VALUE")]
    model_param: Vec<String>,

    /// Comma-separated coordinates of the probe point.
    #[arg(long)]
    point: String,

    #[arg(long, default_value_t = 1000)]
    samples: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long)]
    time_bound: Option<usize>,
}

fn parse_model_params(pairs: &[String]) -> Result<BTreeMap<String, f64>, CliError> {
    let mut map = BTreeMap::new();
    for pair in pairs {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Parse(format!("model parameter '{pair}' is not KEY=VALUE")))?;
        let value: f64 = value
            .parse()
            .map_err(|e| CliError::Parse(format!("model parameter '{pair}': {e}")))?;
        map.insert(key.to_string(), value);
    }
    Ok(map)
}

fn parse_comma_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<T>()
                .map_err(|e| CliError::Parse(format!("{what} entry '{part}': {e}")))
        })
        .collect()
}

impl RunArgs {
    fn into_config(self, mode: Mode) -> Result<RunConfigFile, CliError> {
        if let Some(path) = &self.config {
            return RunConfigFile::load(path);
        }
        Ok(RunConfigFile {
            mode: Some(
                match mode {
                    Mode::Verification => "verify",
                    Mode::Synthesis => "synthesize",
                }
                .to_string(),
            ),
            model: self
                .model
                .ok_or_else(|| CliError::Parse("--model is required".into()))?,
            model_params: parse_model_params(&self.model_param)?,
            total_budget: self
                .budget
                .ok_or_else(|| CliError::Parse("--budget is required".into()))?,
            batch_size: self.batch_size,
            sigma: self.sigma,
            nu_max: self.nu_max,
            rho_max: self.rho_max,
            instances: self.instances,
            eval_samples: self.eval_samples,
            seed: self.seed,
            time_bound: self.time_bound,
            output: self.output,
        })
    }
}

fn cmd_run(args: RunArgs, mode: Mode) -> Result<(), CliError> {
    let config = args.into_config(mode)?;
    let result = execute_run(&config, mode)?;
    if let Some(path) = &config.output {
        write_result(&result, path)?;
    }
    println!(
        "best_point = {}",
        serde_json::to_string(&result.best_point).expect("point serializes")
    );
    println!("best_estimate = {}", result.best_estimate);
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let budgets: Vec<u64> = parse_comma_list(&args.budgets, "budget list")?;
    let repeats = args.repeats;
    // The sweep provides the budget column itself; satisfy the run-config
    // shape with the first entry.
    let mut run_args = args.run;
    if run_args.config.is_none() && run_args.budget.is_none() {
        run_args.budget = budgets.first().copied();
    }
    let config = run_args.into_config(Mode::Verification)?;
    let table = execute_sweep(&config, &budgets, repeats)?;
    match &config.output {
        Some(path) => fs::write(path, &table)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{table}"),
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let params = parse_model_params(&args.model_param)?;
    let model = build_model(&args.model, args.time_bound, &params)?;
    let point: Vec<f64> = parse_comma_list(&args.point, "point")?;
    if args.samples == 0 {
        return Err(CliError::Config("samples must be at least 1".into()));
    }
    let estimate = mc_estimate(&model, &point, args.samples, StreamSeed::new(args.seed, 0))?;
    println!(
        "mean = {} +/- {} (samples = {})",
        estimate.mean, estimate.std_error, estimate.sample_count
    );
    Ok(())
}

fn configure_threads() -> Result<(), CliError> {
    match std::env::var("HOOVER_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw
                .parse()
                .map_err(|e| CliError::Parse(format!("HOOVER_THREADS '{raw}': {e}")))?;
            if n > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Run(format!("thread pool: {e}")))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(EXIT_PARSE);
        }
        Err(e) => {
            // Help and version output.
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let outcome = configure_threads().and_then(|()| match cli.command {
        Command::Verify(args) => cmd_run(args, Mode::Verification),
        Command::Synthesize(args) => cmd_run(args, Mode::Synthesis),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Eval(args) => cmd_eval(args),
    });

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
