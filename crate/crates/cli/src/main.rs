//! Command-line front end: ensembles, sweeps, histograms, and renewal oracle
//! checks with reproducible seeds and machine-readable outputs.
//!
//! Exit codes: 0 success, 2 flag/input errors, 3 censored-sample MFPT
//! requests, 4 numerical blowup, 5 insufficient peaks for the decay fit,
//! 6 renewal oracle disagreement.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod grid;
mod manifest;

#[derive(Parser)]
#[command(
    name = "kramers-reset",
    version,
    about = "Monte Carlo first-passage times of a Langevin particle in a cubic potential, with stochastic resetting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one first-passage ensemble; write samples CSV/JSON and a manifest
    Simulate(SimulateArgs),
    /// Sweep a control parameter and locate noise-aware minima
    Sweep(SweepArgs),
    /// Histogram escape times, optionally fitting the wave-peak decay
    Histogram(HistogramArgs),
    /// Compare direct resetting runs against renewal predictions from a
    /// no-reset sample file
    OracleCheck(OracleCheckArgs),
}

#[derive(Args, Clone)]
struct PhysicsArgs {
    /// Potential coefficient alpha (energy/length^2)
    #[arg(long, default_value_t = 6.0)]
    alpha: f64,
    /// Potential coefficient beta (energy/length^3)
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Damping rate eta
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Noise intensity epsilon
    #[arg(long, default_value_t = 1.8)]
    eps: f64,
    /// Initial (and reset) position
    #[arg(long, default_value_t = -2.899, allow_negative_numbers = true)]
    x0: f64,
    /// Initial velocity
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    v0: f64,
    /// Integrator step
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Censoring horizon
    #[arg(long = "t-max", default_value_t = 1e5)]
    t_max: f64,
    /// Absorbing position (default: the barrier top alpha/beta)
    #[arg(long = "absorb-x", allow_negative_numbers = true)]
    absorb_x: Option<f64>,
    /// No-comeback validation position
    #[arg(long = "validate-x", default_value_t = 100.0)]
    validate_x: f64,
}

#[derive(Args, Clone)]
struct EnsembleArgs {
    /// Trajectories per ensemble
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Master seed; trajectory i uses stream (seed, i)
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Worker threads (fallback: env KRAMERS_RESET_THREADS; default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory
    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,
    /// Data file format
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }
    fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
    fn literal(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Both => "both",
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Reset schedule: none | det:<t_r> | poisson:<r>
    #[arg(long, default_value = "none")]
    reset: String,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SweepKind {
    /// Deterministic resetting period
    Tr,
    /// Poisson resetting via theta = 1/r
    Rate,
    /// Noise intensity (no resetting)
    Noise,
    /// Initial condition (no resetting)
    X0,
}

#[derive(Args)]
struct SweepArgs {
    /// Control to sweep
    #[arg(value_enum)]
    kind: SweepKind,
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Grid for tr/noise/x0 sweeps: start:step:stop or comma list
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Theta grid for rate sweeps: start:step:stop or comma list
    #[arg(long = "theta-grid")]
    theta_grid: Option<String>,
}

#[derive(Args)]
struct HistogramArgs {
    /// Existing samples JSON; when given, simulation flags are ignored
    #[arg(long)]
    samples: Option<PathBuf>,
    #[command(flatten)]
    physics: PhysicsArgs,
    #[command(flatten)]
    ensemble: EnsembleArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Reset schedule: none | det:<t_r> | poisson:<r>
    #[arg(long, default_value = "none")]
    reset: String,
    /// Histogram bin width
    #[arg(long = "bin-width", default_value_t = 0.25)]
    bin_width: f64,
    /// Detect wave peaks and fit RF = a*exp(-b t)
    #[arg(long = "fit-decay")]
    fit_decay: bool,
    /// Peak detection window in bins
    #[arg(long, default_value_t = 2)]
    window: usize,
    /// Keep only peaks holding at least this many samples for the fit; the
    /// far-tail waves carry a handful of counts each and their shot noise
    /// would otherwise dominate the log-linear fit
    #[arg(long = "min-peak-count", default_value_t = 20)]
    min_peak_count: usize,
}

#[derive(Args)]
struct OracleCheckArgs {
    /// No-reset samples JSON produced by `simulate`
    #[arg(long)]
    samples: PathBuf,
    /// Deterministic t_r grid: start:step:stop or comma list
    #[arg(long)]
    grid: Option<String>,
    /// Poisson theta grid (rates r = 1/theta)
    #[arg(long = "theta-grid")]
    theta_grid: Option<String>,
    /// Seed for direct runs and bootstrap resampling
    #[arg(long, default_value_t = 43)]
    seed: u64,
    /// Bootstrap resamples per prediction
    #[arg(long, default_value_t = 200)]
    resamples: usize,
    #[command(flatten)]
    output: OutputArgs,
}

/// Error carrying the documented process exit code.
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn exit_code_for(err: &kramers_reset::Error) -> u8 {
    use kramers_reset::Error::*;
    match err {
        CensoredSamples { .. } => 3,
        NumericalBlowup { .. } | EnsembleFailure { .. } => 4,
        InsufficientPeaks(_) => 5,
        InvalidPotential { .. } | InvalidParams(_) | InvalidSchedule(_) => 2,
        _ => 1,
    }
}

impl From<kramers_reset::Error> for CliError {
    fn from(err: kramers_reset::Error) -> Self {
        Self::new(exit_code_for(&err), err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        Self::new(1, err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(&args),
        Command::Sweep(args) => commands::sweep(&args),
        Command::Histogram(args) => commands::histogram(&args),
        Command::OracleCheck(args) => commands::oracle_check(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
