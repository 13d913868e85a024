use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "stlscond", version, about = "Scaled total least squares: solve and measure conditioning")]
pub struct Cli {
    /// Base seed for problem generation and randomized estimators.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output format; benchmarks default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a test problem with known spectrum (n, ..., 1, 1-ep).
    Gen(GenArgs),
    /// Solve a problem file.
    Solve(SolveArgs),
    /// Condition number of a problem file by one method or all of them.
    Cond(CondArgs),
    /// Timing benchmark over a grid of generated problems.
    BenchTime(BenchTimeArgs),
    /// Estimator accuracy against the exact F2 value.
    BenchRatio(BenchRatioArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long)]
    pub ep: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    /// Cholesky solve with AᵀA − σ²I.
    Normal,
    /// From the last right singular vector of [A λb].
    Svd,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem JSON file.
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Route::Normal)]
    pub route: Route,
}

#[derive(Debug, Args)]
pub struct CondArgs {
    #[arg(long = "in", value_name = "PATH")]
    pub input: PathBuf,
    /// kron, f1, f2, power, pce, sce, tls-bg, ols-f1, ols-f2, ols-kron or all.
    #[arg(long, default_value = "f2")]
    pub method: String,
    #[command(flatten)]
    pub estimators: EstimatorArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Cholesky,
    Cg,
}

#[derive(Debug, Clone, Default, Args)]
pub struct EstimatorArgs {
    /// JSON block {power: {tol, max_iter}, pce: {eps, theta}, sce: {k}, seed}; flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub power_tol: Option<f64>,
    #[arg(long)]
    pub power_max_iter: Option<usize>,
    /// Failure probability of the PCE upper bound.
    #[arg(long)]
    pub pce_eps: Option<f64>,
    /// Target relative width of the PCE bracket.
    #[arg(long)]
    pub pce_theta: Option<f64>,
    /// SCE sample size.
    #[arg(long)]
    pub sce_k: Option<usize>,
    /// Linear solver inside the estimators.
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Comma-separated sizes MxN. Cells such as 1000x700 are slow.
    #[arg(long, value_delimiter = ',', default_value = "200x150")]
    pub sizes: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,5")]
    pub lambdas: Vec<f64>,
    #[arg(long = "ep", value_delimiter = ',', default_value = "0.1,0.001")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    /// Also write the per-cell summary as JSON to this file.
    #[arg(long, value_name = "PATH")]
    pub summary: Option<PathBuf>,
    #[command(flatten)]
    pub estimators: EstimatorArgs,
}

#[derive(Debug, Args)]
pub struct BenchTimeArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_delimiter = ',', default_value = "kron,f2")]
    pub methods: Vec<String>,
}

#[derive(Debug, Args)]
pub struct BenchRatioArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Instead of ratios, run the power method from this many random
    /// starting vectors per problem and emit one timing row per start.
    #[arg(long, value_name = "N")]
    pub vary_initial: Option<usize>,
}
