//! `dm-limits`: convergence-rate bounds from drift and minorization, their
//! floors, and exact checks on finite chains.

mod cmd;
mod error;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

pub const THREADS_ENV: &str = "DM_LIMITS_THREADS";

#[derive(Parser, Debug)]
#[command(name = "dm-limits", version, about = "Drift-and-minorization convergence bounds and their limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form bounds from parameter tuples.
    Bound(BoundArgs),
    /// Exact analysis of a finite chain from a file or a builtin.
    Chain(ChainArgs),
    /// The Gaussian autoregressive case study.
    Gaussian(GaussianArgs),
    /// Langevin sampler floors, tables and simulation.
    Mala(MalaArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    Baxendale,
    Rosenthal,
    Paraoptima,
    Pic1,
    ChainLowerA,
    ChainLowerB,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(value_enum)]
    pub kind: BoundKind,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    #[arg(long = "eps-c")]
    pub eps_c: Option<f64>,
    #[arg(long = "pi-c")]
    pub pi_c: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainAction {
    Load,
    Stationary,
    Rate,
    Epsc,
    VerifyA,
    VerifyB,
    VerifyBivariate,
    M0,
    M1,
    FloorA,
    FloorB,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    Figure1,
    TwoState,
    #[value(name = "rosenthal-2")]
    Rosenthal2,
    Cycle,
    Star,
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    #[arg(value_enum)]
    pub action: ChainAction,
    /// Chain file: JSON `{"labels": [...], "P": [[...]]}` or CSV.
    #[arg(long, conflicts_with = "builtin")]
    pub file: Option<std::path::PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long = "L")]
    pub l: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
    /// Comma-separated state indices.
    #[arg(long, value_delimiter = ',')]
    pub set: Option<Vec<usize>>,
    /// Drift function values, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Option<Vec<f64>>,
    /// Second drift function for the pairwise drift check.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v2: Option<Vec<f64>>,
    /// Minorizing measure, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub nu: Option<Vec<f64>>,
    /// State pairs `x:y`, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub pairs: Option<Vec<String>>,
    #[arg(long = "lambda-prime")]
    pub lambda_prime: Option<f64>,
    #[arg(long = "K-prime")]
    pub k_prime: Option<f64>,
    #[arg(long, default_value_t = dm_limits::chain::DEFAULT_TOL)]
    pub tol: f64,
    /// Write the chain here (`load`); CSV when the name ends in `.csv`.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GaussianAction {
    Optimize,
    Floor,
    RosenthalFloor,
    Curve,
}

#[derive(Args, Debug)]
pub struct GaussianArgs {
    #[arg(value_enum)]
    pub action: GaussianAction,
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long, default_value_t = dm_limits::gaussian_ar::DEFAULT_K)]
    pub k: f64,
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MalaAction {
    FloorA,
    FloorB,
    Table,
    Simulate,
}

#[derive(Args, Debug)]
pub struct MalaArgs {
    #[arg(value_enum)]
    pub action: MalaAction,
    /// Dimension; real-valued so that tables can reach very large n.
    #[arg(long)]
    pub n: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long = "gamma-prime")]
    pub gamma_prime: Option<f64>,
    /// Supremum of the one-dimensional target density.
    #[arg(long = "G")]
    pub g: Option<f64>,
    /// Lipschitz constant of the gradient.
    #[arg(long = "M", default_value_t = 1.0)]
    pub m: f64,
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Keep every `thin`-th state for the distribution test; by default the
    /// run is thinned to about 100000 states.
    #[arg(long)]
    pub thin: Option<u64>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(e.to_string()))
}

/// Output text for a parsed command line.
fn run(cli: Cli) -> Result<String, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Bound(a) => cmd::bound::run(&a),
        Command::Chain(a) => cmd::chain::run(&a),
        Command::Gaussian(a) => cmd::gaussian::run(&a),
        Command::Mala(a) => cmd::mala::run(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
