use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use regcal::heun::Parity;
use regcal::variational::{DEFAULT_BASIS_SIZE, DEFAULT_TRACKED, NULL_THRESHOLD};
use serde::Serialize;

fn parse_parity(s: &str) -> Result<Parity, String> {
    s.parse::<Parity>().map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "regcal",
    version,
    about = "Quasi-exact states, density matrices and entanglement of the regularized two-particle Calogero model",
    after_help = "Set REGCAL_THREADS to bound the worker threads used by sweeps."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form polynomial state on one branch: JSON state, spectrum and ψ(x) table
    ExactSolve(ExactSolveArgs),
    /// Isoenergetic coupling curves g_p^(N)(d²) with the exact von Neumann entropy
    Curves(CurvesArgs),
    /// One-body density matrices and spectra of a closed-form state vs d²
    Rdm(RdmArgs),
    /// Rényi and von Neumann entropies of variational ground states vs g
    Entropy(EntropyArgs),
    /// Variational g-sweep: energies, top-K occupations, entropies and null points
    Sweep(SweepArgs),
    /// Exponent fits and derivative classes at the null points of a sweep
    Kinks(KinksArgs),
    /// Runs the oracle suite and reports pass/fail per check
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutArgs {
    /// Output directory (created if missing)
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[arg(long = "g-min", default_value_t = 0.0, allow_negative_numbers = true)]
    pub g_min: f64,
    #[arg(long = "g-max", default_value_t = 30.0, allow_negative_numbers = true)]
    pub g_max: f64,
    /// Number of intervals; the grid has steps + 1 points
    #[arg(long, default_value_t = 600)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SolverArgs {
    /// Basis size M (parity-matched Hermite functions)
    #[arg(long = "M", default_value_t = DEFAULT_BASIS_SIZE)]
    pub basis_size: usize,
    /// Quadrature nodes; defaults to max(1600, 2M + 32)
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Hermite-DVR projection on 2M nodes instead of the spectral quadrature
    #[arg(long)]
    pub dvr: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExactSolveArgs {
    /// Level N (polynomial degree index)
    #[arg(long = "N")]
    pub level: usize,
    #[arg(long, value_parser = parse_parity)]
    pub parity: Parity,
    /// Branch label p; defaults to the ground-state branch 2N + 2 + σ
    #[arg(long)]
    pub p: Option<usize>,
    /// Squared cutoffs, comma separated
    #[arg(long = "d2", value_delimiter = ',', default_value = "0", allow_negative_numbers = true)]
    pub d2: Vec<f64>,
    /// ψ(x) is tabulated on [−x_max, x_max]
    #[arg(long = "x-max", default_value_t = 5.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurvesArgs {
    #[arg(long = "N-max", default_value_t = 2)]
    pub n_max: usize,
    #[arg(long = "d2-max", default_value_t = 6.0, allow_negative_numbers = true)]
    pub d2_max: f64,
    #[arg(long, default_value_t = 120)]
    pub steps: usize,
    /// Restrict to one parity sector
    #[arg(long, value_parser = parse_parity)]
    pub parity: Option<Parity>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RdmArgs {
    #[arg(long = "N", default_value_t = 0)]
    pub level: usize,
    #[arg(long, value_parser = parse_parity)]
    pub parity: Parity,
    /// Branch label p; defaults to the ground-state branch
    #[arg(long)]
    pub p: Option<usize>,
    /// Explicit squared cutoffs; overrides the d² range
    #[arg(long = "d2", value_delimiter = ',', allow_negative_numbers = true)]
    pub d2: Vec<f64>,
    #[arg(long = "d2-min", default_value_t = 0.0, allow_negative_numbers = true)]
    pub d2_min: f64,
    #[arg(long = "d2-max", default_value_t = 10.0, allow_negative_numbers = true)]
    pub d2_max: f64,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EntropyArgs {
    /// Squared cutoffs, comma separated
    #[arg(long = "d2", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub d2: Vec<f64>,
    #[arg(long, value_parser = parse_parity, default_value = "sym")]
    pub parity: Parity,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Rényi orders, comma separated
    #[arg(long = "a", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub orders: Vec<f64>,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Squared cutoffs, comma separated
    #[arg(long = "d2", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub d2: Vec<f64>,
    #[arg(long, value_parser = parse_parity, default_value = "sym")]
    pub parity: Parity,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Rényi orders, comma separated
    #[arg(long = "a", value_delimiter = ',', allow_negative_numbers = true)]
    pub orders: Vec<f64>,
    /// Tracked occupation numbers per row
    #[arg(long = "K", default_value_t = DEFAULT_TRACKED)]
    pub tracked: usize,
    /// Occupations at or below this count as vanished
    #[arg(long, default_value_t = NULL_THRESHOLD)]
    pub threshold: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct KinksArgs {
    /// Squared cutoffs, comma separated
    #[arg(long = "d2", value_delimiter = ',', required = true, allow_negative_numbers = true)]
    pub d2: Vec<f64>,
    #[arg(long, value_parser = parse_parity, default_value = "sym")]
    pub parity: Parity,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Rényi orders, comma separated
    #[arg(long = "a", value_delimiter = ',', default_value = "0.2,0.5,2", allow_negative_numbers = true)]
    pub orders: Vec<f64>,
    /// Fit points on each side of a null point
    #[arg(long = "per-side", default_value_t = 25)]
    pub per_side: usize,
    #[arg(long, default_value_t = NULL_THRESHOLD)]
    pub threshold: f64,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub out: OutArgs,
}
