//! `ncg`: command-line drivers for the network coloring game toolkit.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when an internal
//! invariant breaks.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "ncg", version, about = "Network coloring game simulation and analysis")]
#[command(after_help = "Any command also accepts --config FILE with `key = value` lines; flags override it.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Random instance: graph, preference profile and a conflict-free coloring.
    Gen(GenArgs),
    /// Play the greedy game once and record its trajectory.
    Play(PlayArgs),
    /// Exact absorption times from the absorbing chain of a small graph.
    Exact(ExactArgs),
    /// Seeded sweep of the resolution time over graph sizes.
    Sweep(SweepArgs),
    /// One network reduction pass on an instance.
    Reduce(InstanceArgs),
    /// Alternate reduction and resampling until everyone has left.
    Localopt(LocalArgs),
    /// Repeat local runs and estimate the expected optimum.
    Estimate(EstimateArgs),
    /// Simulated annealing under one or more temperature schedules.
    Anneal(AnnealArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_rounds: usize,
    /// Fail instead of redrawing graphs whose maximum degree exceeds q - 2.
    #[arg(long)]
    pub no_regenerate: bool,
    #[arg(long, default_value_t = 1_000)]
    pub max_attempts: usize,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PlayArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_rounds: usize,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Er,
    Complete,
    Path,
    Star,
    Edgeless,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExactArgs {
    /// Graph file; otherwise `--family` and `--n` build one.
    #[arg(long, conflicts_with = "family")]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    /// Vertex count (leaf count for a star).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub q: usize,
    /// Solve in exact rational arithmetic.
    #[arg(long)]
    pub rational: bool,
    /// Power of Q up to which the decay of Q^t is tracked.
    #[arg(long, default_value_t = 200)]
    pub t_max: u64,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    #[arg(long, value_enum, default_value = "er")]
    pub family: Family,
    /// Edge probability for `er`.
    #[arg(long, conflicts_with = "degree")]
    pub p: Option<f64>,
    /// Expected degree for `er`: p = degree / (n - 1).
    #[arg(long)]
    pub degree: Option<f64>,
    /// Fixed palette; otherwise max degree + `palette_slack` per graph.
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long, default_value_t = 2)]
    pub palette_slack: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub trials_per_graph: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1_000_000)]
    pub max_rounds: usize,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct InstanceArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub prefs: PathBuf,
    #[arg(long)]
    pub coloring: PathBuf,
    #[arg(long, default_value = "out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Standard,
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stall {
    Freeze,
    Fail,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LocalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Resampling proposals per phase.
    #[arg(long, default_value_t = 1_000)]
    pub steps: u64,
    #[arg(long, value_enum, default_value = "standard")]
    pub mode: Mode,
    #[arg(long, value_enum, default_value = "freeze")]
    pub stall: Stall,
    /// Defaults to 10 n.
    #[arg(long)]
    pub phase_cap: Option<usize>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub local: LocalArgs,
    /// Repetitions.
    #[arg(long, default_value_t = 1_000)]
    pub trials: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnnealArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200_000)]
    pub steps: u64,
    /// Comma-separated: log1p, linear, quadratic, constant[:l], geometric:l:g:s.
    #[arg(long, value_delimiter = ',', default_value = "log1p,linear,quadratic")]
    pub schedule: Vec<String>,
    #[arg(long, value_enum, default_value = "standard")]
    pub mode: Mode,
}

enum Failure {
    /// Already reported by the argument parser.
    Usage,
    Core(ncg_core::Error),
}

impl From<ncg_core::Error> for Failure {
    fn from(e: ncg_core::Error) -> Self {
        Failure::Core(e)
    }
}

fn run(args: Vec<String>) -> Result<(), Failure> {
    let args = config::merge(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Err(Failure::Usage) } else { Ok(()) };
        }
    };
    let done = match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Play(a) => commands::play(&a),
        Command::Exact(a) => commands::exact(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Reduce(a) => commands::reduce(&a),
        Command::Localopt(a) => commands::localopt(&a),
        Command::Estimate(a) => commands::estimate(&a),
        Command::Anneal(a) => commands::anneal(&a),
    };
    Ok(done?)
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_internal() { 2 } else { 1 })
        }
    }
}
