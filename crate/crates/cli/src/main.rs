//! `haarscatter`: scattering features, reconstructions, parameter
//! identification, and the benchmark suite from one binary.
//!
//! Exit codes: 0 on success, 2 for usage or validation problems, 3 when a
//! computation runs into non-finite data.

mod benchmark;
mod csvio;
mod extract;
mod identify;
mod input;
mod reconstruct;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Errors surfaced to the shell, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad files, bad parameters: exit 2.
    Usage(String),
    /// Non-finite data encountered while computing: exit 3.
    Numeric(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<haarscatter::Error> for CliError {
    fn from(e: haarscatter::Error) -> Self {
        match e {
            haarscatter::Error::NonFiniteSample { .. } | haarscatter::Error::NonFiniteValue { .. } => {
                CliError::Numeric(e.to_string())
            }
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "haarscatter",
    version,
    about = "Haar scattering cascades: extract features, reconstruct signals, identify generator parameters, run benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate a cascade and emit the deepest layer as CSV
    Extract(ExtractArgs),
    /// Search pairing rules, fit a coarse-grid reconstruction, emit
    /// predictions and a report
    Reconstruct(ReconstructArgs),
    /// Sweep a generator parameter and fit a readout across realizations
    Identify(IdentifyArgs),
    /// Run the four reference experiments and summarize against the
    /// published values
    Benchmark(BenchmarkArgs),
}

/// Where the signal comes from: a CSV file, a generator family, or a JSON
/// spec file.
#[derive(Args)]
pub struct SourceArgs {
    /// CSV input; one sample per line, last column if several, optional header
    #[arg(long, conflicts_with_all = ["family", "spec"])]
    pub input: Option<PathBuf>,
    /// Generator family: sinusoid, exponential, logistic, ar1
    #[arg(long, conflicts_with = "spec")]
    pub family: Option<String>,
    /// Generator parameter as key=value (repeatable); see the README for keys
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// JSON generator spec file
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Seed for noisy generators
    #[arg(long, default_value_t = haarscatter::signals::DEFAULT_SEED)]
    pub seed: u64,
    /// Extend a short CSV input to the next power of two by repeating the
    /// last sample
    #[arg(long, conflicts_with = "truncate")]
    pub pad: bool,
    /// Cut a CSV input down to the largest power of two that fits
    #[arg(long)]
    pub truncate: bool,
}

/// Cascade shape and candidate grid.
#[derive(Args)]
pub struct CascadeArgs {
    /// Number of cascade transitions
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Comma-separated scale candidates for the rule search
    #[arg(long = "sigma-grid", value_name = "LIST")]
    pub sigma_grid: Option<String>,
    /// Comma-separated shift candidates for the rule search
    #[arg(long = "tau-grid", value_name = "LIST")]
    pub tau_grid: Option<String>,
    /// Pick one rule per transition greedily instead of one shared rule
    #[arg(long = "per-layer")]
    pub per_layer: bool,
    /// Keep signed differences instead of rectifying them
    #[arg(long = "no-abs")]
    pub no_abs: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransferArg {
    Identity,
    Abs,
    Log1p,
}

impl TransferArg {
    pub fn to_core(self) -> haarscatter::Transfer {
        match self {
            TransferArg::Identity => haarscatter::Transfer::Identity,
            TransferArg::Abs => haarscatter::Transfer::Abs,
            TransferArg::Log1p => haarscatter::Transfer::Log1p,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TransferArg::Identity => "identity",
            TransferArg::Abs => "abs",
            TransferArg::Log1p => "log1p",
        }
    }
}

#[derive(Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub cascade: CascadeArgs,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct ReconstructArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub cascade: CascadeArgs,
    /// Add a constant term to the readout
    #[arg(long)]
    pub intercept: bool,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    /// Predict a representative sample from features
    Forward,
    /// Predict the swept parameter from features
    Inverse,
}

impl Direction {
    pub fn name(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Inverse => "inverse",
        }
    }
}

#[derive(Args)]
pub struct IdentifyArgs {
    /// Generator family: sinusoid, exponential, logistic, ar1
    #[arg(long)]
    pub family: String,
    /// Fixed generator parameter as key=value (repeatable); the swept one
    /// comes from the theta range
    #[arg(long = "param", value_name = "KEY=VALUE")]
    pub params: Vec<String>,
    /// First swept parameter value
    #[arg(long = "theta-start")]
    pub theta_start: Option<f64>,
    /// Last swept parameter value (inclusive)
    #[arg(long = "theta-stop")]
    pub theta_stop: Option<f64>,
    /// Spacing of swept parameter values
    #[arg(long = "theta-step")]
    pub theta_step: Option<f64>,
    /// Readout direction
    #[arg(long, value_enum, default_value_t = Direction::Inverse)]
    pub direction: Direction,
    #[command(flatten)]
    pub cascade: CascadeArgs,
    /// Feature transfer applied before the fit
    #[arg(long, value_enum, default_value_t = TransferArg::Identity)]
    pub transfer: TransferArg,
    /// Add a constant term to the readout
    #[arg(long)]
    pub intercept: bool,
    /// Base seed; realization i of the sweep uses seed + i
    #[arg(long, default_value_t = haarscatter::signals::DEFAULT_SEED)]
    pub seed: u64,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct BenchmarkArgs {
    /// Base seed for the noisy experiments
    #[arg(long, default_value_t = haarscatter::signals::DEFAULT_SEED)]
    pub seed: u64,
    /// Cascade depth used by every experiment
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Extract(args) => extract::run(&args),
        Command::Reconstruct(args) => reconstruct::run(&args),
        Command::Identify(args) => identify::run(&args),
        Command::Benchmark(args) => benchmark::run(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
