mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::{Failure, Format};

/// Expanded-node budget per marginal unless overridden.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Parser)]
#[command(
    name = "sawcount",
    version,
    about = "Deterministic approximate counting for the hard-core and monomer-dimer models"
)]
struct Cli {
    /// Output format. Tables default to text, single records to json.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,

    /// Worker threads for the data-parallel kernels.
    #[arg(
        long,
        env = "SAWCOUNT_THREADS",
        default_value_t = 1,
        value_parser = clap::value_parser!(u64).range(1..=1024),
        global = true
    )]
    threads: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Hard-core partition function (independent sets weighted by lambda^|I|)
    HcCount(HcCountArgs),
    /// Monomer-dimer partition function (matchings weighted by gamma^|M|)
    MdCount(MdCountArgs),
    /// Occupation ratio of one vertex, optionally under a boundary condition
    HcMarginal(HcMarginalArgs),
    /// Monomer probability of one vertex
    MdMarginal(MdMarginalArgs),
    /// Decay factors and exponents for a grid of activities and degree bounds
    DecayTable(DecayTableArgs),
    /// Self-avoiding-walk growth profile of a graph
    ConnConst(ConnConstArgs),
    /// Branching-matrix bound on the connective constant of the Z2 Weitz tree
    Z2Branching(Z2Args),
    /// Strong-spatial-mixing activity bounds for the standard lattices
    LatticeBounds,
    /// Generate a graph in edge-list format
    Gen(GenArgs),
    /// Exact partition function and marginals by exhaustive enumeration
    Oracle(OracleArgs),
}

#[derive(Args, Serialize)]
pub struct HcCountArgs {
    /// Edge-list file
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    /// Target relative error of the estimate
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    /// Expanded-node budget per marginal
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Serialize)]
pub struct MdCountArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Doubling,
    Increment,
}

#[derive(Args, Serialize)]
pub struct MarginalOpts {
    /// Half-width of the certified interval to reach
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Evaluate this single truncation depth instead of searching
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long, value_enum, default_value = "doubling")]
    pub schedule: Schedule,
    /// Expanded-node budget, shared by every depth tried
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Args, Serialize)]
pub struct HcMarginalArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub vertex: usize,
    #[arg(long)]
    pub lambda: f64,
    /// Vertices pinned occupied (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub occupied: Vec<usize>,
    /// Vertices pinned unoccupied (comma separated)
    #[arg(long, value_delimiter = ',')]
    pub unoccupied: Vec<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub opts: MarginalOpts,
}

#[derive(Args, Serialize)]
pub struct MdMarginalArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub vertex: usize,
    #[arg(long)]
    pub gamma: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub opts: MarginalOpts,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    HardCore,
    MonomerDimer,
}

#[derive(Args, Serialize)]
pub struct DecayTableArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Activities: lambda for hard-core, gamma for monomer-dimer
    #[arg(long, value_delimiter = ',', required = true)]
    pub activity: Vec<f64>,
    /// Connective-constant bounds (monomer-dimer: degree bounds)
    #[arg(long, value_delimiter = ',', required = true)]
    pub delta: Vec<f64>,
}

#[derive(Args, Serialize)]
pub struct ConnConstArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Longest walk length
    #[arg(long, default_value_t = 12)]
    pub l_max: usize,
    /// Sample this many roots instead of using every vertex
    #[arg(long)]
    pub roots: Option<usize>,
    /// Seed for root sampling
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Walk budget per root
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingArg {
    Relative,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PruningArg {
    None,
    Weitz,
}

#[derive(Args, Serialize)]
pub struct Z2Args {
    /// Memory: cycles up to this length are excluded (even, at least 2)
    #[arg(short = 'L', long = "L", alias = "memory")]
    pub memory: usize,
    #[arg(long, value_enum, default_value = "relative")]
    pub ordering: OrderingArg,
    #[arg(long, value_enum, default_value = "weitz")]
    pub pruning: PruningArg,
    /// Power-method stopping tolerance
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = sawcount::connconst::DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    /// Also report automaton walk counts for lengths 1..=N
    #[arg(long, default_value_t = 0)]
    pub walks: usize,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Cycle,
    Complete,
    Grid,
    DaryTree,
    Gnp,
}

#[derive(Args, Serialize)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,
    /// Vertex count (cycle, complete, gnp)
    #[arg(long)]
    pub n: Option<usize>,
    /// Expected average degree (gnp)
    #[arg(long)]
    pub d: Option<f64>,
    /// Children per internal vertex (dary-tree)
    #[arg(long)]
    pub arity: Option<usize>,
    /// Depth (dary-tree)
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long)]
    pub height: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the edge list here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
#[command(group(ArgGroup::new("activity").required(true).args(["lambda", "gamma"])))]
pub struct OracleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Hard-core activity
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Monomer-dimer activity
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Also report the marginal at this vertex
    #[arg(long)]
    pub vertex: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub occupied: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub unoccupied: Vec<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let threads = cli.threads as usize;
    let outcome = sawcount::par::with_threads(threads, || commands::run(&cli.command, threads));
    match outcome {
        Ok(out) => {
            let partial = out.is_partial();
            if let Err(e) = out.emit(cli.format) {
                eprintln!("sawcount: {e}");
                return ExitCode::from(1);
            }
            if partial {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("sawcount: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("sawcount: {msg}");
            ExitCode::from(1)
        }
    }
}
