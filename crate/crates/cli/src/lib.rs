//! Command-line front end: `allocate`, `threshold`, `simulate` and
//! `gen-graph`, driven by a TOML run configuration.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use sais_core::graph::GraphKind;

use config::{RunConfig, SimulationMode};
use error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "sais",
    version,
    about = "Awareness allocation and SAIS epidemic simulation on contact networks"
)]
pub struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cost-optimal awareness rates that certify die-out.
    Allocate(AllocateArgs),
    /// Spectral die-out test and epidemic threshold at the configured rates.
    Threshold(RunArgs),
    /// Mean-field or Gillespie simulation.
    Simulate(SimulateArgs),
    /// Write a synthetic graph as an edge list.
    GenGraph(GenGraphArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Edge-list file, replacing the config's [graph] section.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Run seed for generators and simulation.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Require `λ1 ≤ -EPS` instead of `≤ 0`; without a value, `1e-3 · min δ`.
    #[arg(long, value_name = "EPS", num_args = 0..=1)]
    pub epsilon_backoff: Option<Option<f64>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub mode: Option<SimulationMode>,
    /// Gillespie ensemble size.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Simulate with the awareness rates from this allocation.json.
    #[arg(long)]
    pub allocation: Option<PathBuf>,
    /// Also simulate `κ = κ_lower` next to the allocation.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Args)]
pub struct GenGraphArgs {
    /// complete, star, cycle, path, er:P or pa:M0.
    #[arg(long)]
    pub kind: GraphKind,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn load(args: &RunArgs) -> CliResult<RunConfig> {
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(g) = &args.graph {
        cfg.set_graph_file(g.clone());
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Allocate(a) => commands::allocate(&load(&a.run)?, a.epsilon_backoff),
        Command::Threshold(a) => commands::threshold(&load(a)?),
        Command::Simulate(a) => commands::simulate(
            &load(&a.run)?,
            &commands::SimulateRequest {
                mode: a.mode,
                runs: a.runs,
                allocation: a.allocation.clone(),
                compare: a.compare,
            },
        ),
        Command::GenGraph(a) => commands::gen_graph(a.kind, a.n, a.seed, a.out.as_deref()),
    }
}
