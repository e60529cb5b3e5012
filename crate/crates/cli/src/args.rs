use std::path::PathBuf;

use bidiag_traces::oracle::DEFAULT_PATH_SUM_BUDGET;
use bidiag_traces::{Method, Side, ZDirection};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::gen::Distribution;
use crate::report::Format;

#[derive(Debug, Parser)]
#[command(
    name = "bidiag-traces",
    version,
    about = "Inverse Gram power traces and minimal singular value bounds of bidiagonal matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print J_1..J_M for each selected method.
    Trace(EngineArgs),
    /// Print the diagonals v^(m), w^(m) of the Gram inverse powers.
    Diag(EngineArgs),
    /// Print the lower bounds theta_M next to the reference sigma_min.
    Bounds(EngineArgs),
    /// Cross-check two or more methods, the factorial transforms and the path sums.
    Compare(CompareArgs),
    /// Time the engines on generated matrices and measure their overflow reach.
    Bench(BenchArgs),
    /// Dense reference traces, sigma_min and path sums.
    Oracle(OracleArgs),
    /// Write generated matrices in the text format.
    Gen(GenArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// Matrix file in the text format.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Inline matrix "q1,q2,...;e1,e2,...".
    #[arg(long)]
    pub inline: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Upper,
    Lower,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Self {
        match s {
            SideArg::Upper => Side::Upper,
            SideArg::Lower => Side::Lower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum ZDirectionArg {
    #[default]
    Forward,
    Backward,
}

impl From<ZDirectionArg> for ZDirection {
    fn from(z: ZDirectionArg) -> Self {
        match z {
            ZDirectionArg::Forward => ZDirection::Forward,
            ZDirectionArg::Backward => ZDirection::Backward,
        }
    }
}

fn parse_order(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(m) => Ok(m),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct EngineArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// kyn11, ykn12, ykyy14, new or oracle; repeatable.
    #[arg(long = "method")]
    pub methods: Vec<Method>,
    #[arg(long, default_value = "4", value_parser = parse_order)]
    pub max_order: usize,
    /// Which Gram matrix to sum over; defaults to each method's natural side.
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    /// Sweep direction of the auxiliary z row (kyn11 only).
    #[arg(long, value_enum, default_value_t)]
    pub z_direction: ZDirectionArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Largest number of terms a path-sum enumeration may visit.
    #[arg(long, default_value_t = DEFAULT_PATH_SUM_BUDGET)]
    pub budget: u64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "4", value_parser = parse_order)]
    pub max_order: usize,
    #[arg(long, default_value_t = DEFAULT_PATH_SUM_BUDGET)]
    pub budget: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Matrix orders, comma separated.
    #[arg(long = "n", value_delimiter = ',', num_args = 0..)]
    pub sizes: Vec<usize>,
    /// Trace orders, comma separated.
    #[arg(long = "m", value_delimiter = ',', default_value = "8", value_parser = parse_order)]
    pub orders: Vec<usize>,
    /// Engines to time; defaults to the four recurrences.
    #[arg(long = "method")]
    pub methods: Vec<Method>,
    #[arg(long, default_value = "uniform:0.5:2")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Timed repetitions per cell (each on a fresh matrix).
    #[arg(long, default_value_t = 3, value_parser = parse_order)]
    pub reps: usize,
    /// Highest order tried when measuring reach.
    #[arg(long, default_value_t = 1000, value_parser = parse_order)]
    pub reach_limit: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long = "n", value_parser = parse_order)]
    pub n: usize,
    #[arg(long, default_value = "uniform:0.5:2")]
    pub dist: Distribution,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of matrices; more than one needs --output naming a directory.
    #[arg(long, default_value_t = 1, value_parser = parse_order)]
    pub count: usize,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
