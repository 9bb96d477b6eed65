//! Experiment driver behind the `acp` binary.
//!
//! Every mode validates its parameters before running anything, runs its
//! replicas on a dedicated thread pool, and writes `<mode>.csv`,
//! `summary.json` and `timing.json` into the output directory. Replica `r`
//! always uses `replica_stream(seed, r)`, so outputs other than
//! `timing.json` are byte-identical for a given configuration and seed.

pub mod config;
mod modes;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use thiserror::Error;

pub use config::{ExperimentConfig, Mode, Params};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{key}`: {message}")]
    Validation { key: String, message: String },

    #[error("runtime budget exceeded: {0}")]
    Budget(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(acp_core::Error),
}

impl From<acp_core::Error> for CliError {
    fn from(e: acp_core::Error) -> Self {
        match e {
            acp_core::Error::InvalidParameter { name, reason } => CliError::Validation {
                key: name.to_owned(),
                message: reason,
            },
            acp_core::Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            other => CliError::Core(other),
        }
    }
}

impl CliError {
    /// 2 validation, 3 budget, 1 failed verification, 4 anything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => 2,
            CliError::Budget(_) => 3,
            CliError::VerificationFailed(_) => 1,
            CliError::Io { .. } | CliError::Core(_) => 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Simulate,
    Branching,
    Meanfield,
    Percolation,
    Block,
    Verify,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Simulate => Mode::Simulate,
            ModeArg::Branching => Mode::Branching,
            ModeArg::Meanfield => Mode::Meanfield,
            ModeArg::Percolation => Mode::Percolation,
            ModeArg::Block => Mode::Block,
            ModeArg::Verify => Mode::Verify,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "acp", version, about = "Contact process with an asymptomatic state")]
pub struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    pub mode: ModeArg,
    /// Flat key=value configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed; replica r uses the stream derived from (seed, r).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "acp-out")]
    pub out: String,
    /// Extra key=value parameter; overrides the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Cli {
    pub fn into_config(self) -> Result<ExperimentConfig, CliError> {
        let mut params = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
                Params::parse(&text)?
            }
            None => Params::default(),
        };
        for pair in &self.set {
            let (k, v) = pair.split_once('=').ok_or_else(|| CliError::Validation {
                key: pair.clone(),
                message: "expected KEY=VALUE".into(),
            })?;
            params.set(k.trim(), v.trim());
        }
        let seed = match self.seed {
            Some(s) => s,
            None => params.get("seed", 0u64)?,
        };
        let replicas = match self.replicas {
            Some(r) => Some(r),
            None => params.get_opt("replicas")?,
        };
        if replicas == Some(0) {
            return Err(CliError::Validation {
                key: "replicas".into(),
                message: "must be positive".into(),
            });
        }
        let jobs = match self.jobs {
            Some(j) => Some(j),
            None => params.get_opt("jobs")?,
        };
        if jobs == Some(0) {
            return Err(CliError::Validation {
                key: "jobs".into(),
                message: "must be positive".into(),
            });
        }
        Ok(ExperimentConfig {
            mode: self.mode.into(),
            parameters: params,
            replicas,
            seed,
            jobs,
            output_path: self.out,
        })
    }
}

/// Validates, runs and writes one experiment.
pub fn run_experiment(mut config: ExperimentConfig) -> Result<(), CliError> {
    let started = Instant::now();
    let plan = modes::plan(&mut config)?;
    config.parameters.finish()?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = config.jobs {
        builder = builder.num_threads(jobs);
    }
    let pool = builder.build().map_err(|e| CliError::Validation {
        key: "jobs".into(),
        message: e.to_string(),
    })?;
    let result = pool.install(|| plan.run(config.seed))?;

    let out = output::OutputDir::create(&config.output_path)?;
    out.write(&result.file_name, &result.body)?;
    for (name, body) in &result.extra_files {
        out.write(name, body)?;
    }
    out.write("summary.json", &output::summary_json(&config, &result.aggregates))?;
    out.write(
        "timing.json",
        &output::timing_json(started.elapsed().as_secs_f64(), pool.current_num_threads()),
    )?;
    match result.failure {
        Some(msg) => Err(CliError::VerificationFailed(msg)),
        None => Ok(()),
    }
}
