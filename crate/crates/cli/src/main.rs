//! `airmax`: run max-consensus scenarios, randomized batches and the TDMA ratio study.
//!
//! Exit codes: 0 success, 1 round cap exhausted, 2 configuration error, 3 internal error.

mod commands;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use airmax::engine::TraceLevel;
use airmax::protocol::ProtocolKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::scenario::ConfigError;

#[derive(Debug, Parser)]
#[command(name = "airmax", version, about = "Max-consensus over a wireless multiple-access channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one scenario to consensus or the round cap.
    Run(RunArgs),
    /// Run a scenario repeatedly, trial `i` with every seed shifted by `i`.
    Batch(BatchArgs),
    /// Compare traditional and broadcast convergence on random graphs.
    Ratio(RatioArgs),
    /// Check a scenario file without running it.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum NumericArg {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TraceArg {
    Summary,
    Full,
}

impl From<TraceArg> for TraceLevel {
    fn from(t: TraceArg) -> Self {
        match t {
            TraceArg::Summary => TraceLevel::Summary,
            TraceArg::Full => TraceLevel::Full,
        }
    }
}

/// Overrides applied on top of a scenario file.
#[derive(Debug, Args)]
pub struct Overrides {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Base seed; replaces `simulation.seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Artifact directory; replaces `output.dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub numeric: Option<NumericArg>,
    /// Round cap; replaces `simulation.round_cap`.
    #[arg(long)]
    pub cap: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Overrides,
    #[arg(long, value_enum)]
    pub trace: Option<TraceArg>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    #[command(flatten)]
    pub common: Overrides,
    #[arg(long)]
    pub trials: u64,
}

#[derive(Debug, Args)]
pub struct RatioArgs {
    /// Network sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 20, 50, 100])]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 30)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Fixed edge probability for every size.
    #[arg(long, conflicts_with = "mean_degree")]
    pub edge_probability: Option<f64>,
    /// Expected degree; the edge probability is `d / (n - 1)`. Default 4.
    #[arg(long)]
    pub mean_degree: Option<f64>,
    #[arg(long, value_enum, default_value = "exact")]
    pub numeric: NumericArg,
    /// Broadcast protocol to compare against the traditional one.
    #[arg(long, default_value = "switching", value_parser = parse_protocol)]
    pub protocol: ProtocolKind,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
}

fn parse_protocol(s: &str) -> Result<ProtocolKind, String> {
    s.parse::<ProtocolKind>().map_err(|e| e.to_string())
}

/// How a command finished.
pub enum Status {
    Done,
    CapExhausted,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => commands::run(args),
        Command::Batch(args) => commands::batch(args),
        Command::Ratio(args) => commands::ratio(args),
        Command::Validate(args) => commands::validate(args),
    };
    match result {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::CapExhausted) => ExitCode::from(1),
        Err(err) if err.is::<ConfigError>() => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("internal error: {err:#}");
            ExitCode::from(3)
        }
    }
}
