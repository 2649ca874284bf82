use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Quasi-Monte Carlo integration on unions of Korobov p-sets.
///
/// Density constants come from `--c-p`, then `--constants`, then the file
/// named by `KOROBOV_QMC_CONSTANTS`, then the shipped calibration
/// (c_P = 0.230, C_P = 0.620, m_max = 100000).
#[derive(Debug, Parser)]
#[command(name = "korobov-qmc", version)]
pub struct Cli {
    /// Override the lower density constant c_P.
    #[arg(long = "c-p", global = true)]
    pub c_p: Option<f64>,

    /// JSON file with {"c_p":…,"C_p":…,"m_max":…}.
    #[arg(long, global = true, env = "KOROBOV_QMC_CONSTANTS")]
    pub constants: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the primes in (⌈m/2⌉, m], or calibrate the density constants.
    Primes(PrimesArgs),
    /// Export the points of a union set.
    Points(PointsArgs),
    /// Weighted norm of a function file.
    Norm(NormArgs),
    /// Normalized exponential sum with its bound.
    Expsum(ExpsumArgs),
    /// Integrate a function with a union rule and report the certified error.
    Integrate(IntegrateArgs),
    /// Worst-case error certificate for a union of size m.
    Certify(CertifyArgs),
    /// Smallest m meeting a target worst-case error.
    Plan(PlanArgs),
    /// Build a fooling function for a set of nodes.
    Fool(FoolArgs),
    /// Re-check a certificate or rerun a bound sweep.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true)]
pub struct PrimesArgs {
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub json: bool,
    #[command(subcommand)]
    pub action: Option<PrimesAction>,
}

#[derive(Debug, Subcommand)]
pub enum PrimesAction {
    /// Fit c_P and C_P over 2 ≤ m ≤ max.
    Calibrate {
        #[arg(long)]
        max: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PointKind {
    S,
    T,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum UnionKind {
    P1,
    P2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AnyKind {
    S,
    T,
    P1,
    P2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Scheme {
    F1,
    F2,
    F3,
}

#[derive(Debug, Args)]
pub struct PointsArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub kind: PointKind,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub d: usize,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub scheme: Scheme,
    #[arg(long = "fn")]
    pub function: PathBuf,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("size").required(true).args(["p", "m"]))]
pub struct ExpsumArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub kind: AnyKind,
    /// Dense frequency, comma separated, e.g. "1,-2,0".
    #[arg(long, allow_hyphen_values = true)]
    pub k: String,
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    /// Include every check performed and exit 2 if any fails.
    #[arg(long)]
    pub report: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["function", "builtin"]))]
pub struct IntegrateArgs {
    #[arg(long, value_enum, ignore_case = true)]
    pub kind: UnionKind,
    #[arg(long, required_unless_present = "ms")]
    pub m: Option<u64>,
    #[arg(long = "fn")]
    pub function: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Dimension for builtin functions.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Seed for the `random` builtin.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit an error-vs-m table instead of JSON.
    #[arg(long)]
    pub csv: bool,
    /// Comma-separated list of m values for the table.
    #[arg(long, value_delimiter = ',')]
    pub ms: Option<Vec<u64>>,
}

/// Named test integrands, each with unit F2 norm.
#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Builtin {
    /// Mean of cos(2π x_j) over the coordinates.
    Cosine,
    /// cos(2π(3x_1 − 2x_d)), a single mixed frequency pair.
    Mixed,
    /// Seeded random trigonometric polynomial.
    Random,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub d: usize,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub d: usize,
}

#[derive(Debug, Args)]
pub struct FoolArgs {
    #[arg(long)]
    pub nodes: PathBuf,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub weights: Option<PathBuf>,
    /// Also write g★ as a function file.
    #[arg(long)]
    pub g_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(subcommand)]
    pub check: VerifyCheck,
}

#[derive(Debug, Subcommand)]
pub enum VerifyCheck {
    /// Re-derive a fooling certificate against its nodes.
    Certificate {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        nodes: PathBuf,
        #[arg(long)]
        weights: Option<PathBuf>,
    },
    /// |sum| ≤ width/p over a frequency grid.
    Lemma(GridArgs),
    /// Root decomposition of S-set sums over a frequency grid.
    Decomposition(GridArgs),
    /// Density constants bracket every window up to --max.
    Density {
        #[arg(long, default_value_t = 100_000)]
        max: u64,
    },
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    pub dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "7,11,13")]
    pub primes: Vec<u64>,
    /// Entries range over −r..=r.
    #[arg(long, default_value_t = 3)]
    pub r: i64,
}
