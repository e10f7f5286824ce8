//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use torus_hypo::diophantine::DEFAULT_HORIZON;

#[derive(Debug, Parser)]
#[command(name = "torus-hypo", version, about = "Classify, solve and probe tube systems of vector fields on the torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Add wall-clock timings to the report (the bytes then vary between runs)
    #[arg(long, global = true)]
    pub timing: bool,
    /// Decimal digits for exact evaluation of real constants
    #[arg(long, global = true, default_value_t = 60)]
    pub precision: u32,
    /// Write the report to this file instead of stdout
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide global hypoellipticity of a system
    Classify(ClassifyArgs),
    /// Continued fraction tables
    #[command(subcommand)]
    Cf(CfCommand),
    /// Solve L_j u = f_j
    Solve(SolveArgs),
    /// Build a singular solution of a non-hypoelliptic system
    Singular(SingularArgs),
    /// Reduce the real parts to their averages
    Normalform(NormalformArgs),
    /// Everything known about a system, tube by tube
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Gevrey,
    Smooth,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// System spec (JSON)
    pub spec: PathBuf,
    /// Gevrey order, decimal or rational; defaults to the spec's order
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long, value_enum, default_value = "gevrey")]
    pub mode: Mode,
    /// Convergents examined per continued fraction
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: usize,
}

#[derive(Debug, Args)]
pub struct CfArgs {
    /// Digit stream: `factorial_pow10`, `constant:<d>`, `explicit:<d1>,<d2>,...` or JSON
    pub digits: String,
    /// Number of convergents
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Gevrey order for the exponential scores
    #[arg(long)]
    pub s: Option<String>,
}

#[derive(Debug, Args)]
pub struct ConditionBArgs {
    pub digits: String,
    /// Last index checked
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long, default_value = "2")]
    pub s: String,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    /// First index checked
    #[arg(long = "from", default_value_t = 3)]
    pub start: usize,
}

#[derive(Debug, Subcommand)]
pub enum CfCommand {
    /// p_n, q_n and the digits
    Convergents(CfArgs),
    /// Exact brackets of |p_n - alpha q_n|
    Bounds(CfArgs),
    /// Liouville and exponential-Liouville trends
    Classify(CfArgs),
    /// Certified lower bounds |p_n - alpha q_n| >= exp(-eps q_{n-1}^{1/s})
    ConditionB(ConditionBArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub spec: PathBuf,
    /// Right-hand sides: `{"f": [field, ...]}` with one field per tube
    pub rhs: PathBuf,
    /// Where to write u (`.thff` for the binary format, JSON otherwise)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Minimum quadrature nodes per frequency of the single-tube solver
    #[arg(long = "nodes", default_value_t = 1024)]
    pub nodes: usize,
    /// Gevrey order of the decay fit; defaults to the spec's order
    #[arg(long)]
    pub s: Option<String>,
}

#[derive(Debug, Args)]
pub struct SingularArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub s: Option<String>,
    /// Largest ladder frequency of Laplace-type factors
    #[arg(long, default_value_t = 4096)]
    pub xi_max: u64,
    /// Ladder length when every factor has unit modulus
    #[arg(long, default_value_t = 64)]
    pub k_max: usize,
    /// Grid points per variable of the written coefficients
    #[arg(long, default_value_t = 256)]
    pub nt: usize,
    /// Leading ladder entries written on the grid
    #[arg(long, default_value_t = 16)]
    pub rows: usize,
    /// Approximation witness for the averages of the real fields (JSON)
    #[arg(long)]
    pub witness: Option<PathBuf>,
    /// Where to write the solution (certificate plus coefficients)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormalformArgs {
    pub spec: PathBuf,
    /// Field used to measure the conjugation residual
    #[arg(long)]
    pub field: Option<PathBuf>,
    /// Where to write the normalised spec
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gevrey order of the gauge growth table; defaults to the spec's order
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 12)]
    pub max_order: usize,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    pub spec: PathBuf,
    #[arg(long)]
    pub s: Option<String>,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    pub horizon: usize,
}
