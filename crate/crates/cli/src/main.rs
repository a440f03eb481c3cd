//! `hopcut`: build lower-bound instances, verify them, and attack them.

mod attack;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hopcut_core::hopset::Constants;
use hopcut_core::Error;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  a verification suite failed
  2  invalid parameters or usage
  3  hopset tie/collision resample budget exhausted (also the reduction retry budget)
  4  corrupt or unreadable archive, or another I/O error
  5  shortcut retry budget exhausted (paths kept leaving the grid)
  6  exact arithmetic overflow";

#[derive(Parser, Debug)]
#[command(name = "hopcut", version, about = "Lower-bound instances for exact hopsets and shortcut sets", after_help = EXIT_CODES)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log progress to standard error (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build an instance and write it as an archive directory.
    Gen(GenArgs),
    /// Run verification suites on an archive.
    Verify(VerifyArgs),
    /// Run adversaries against an archive and write CSV rows.
    Attack(AttackArgs),
    /// Subsample a graph into a smaller reachability graph.
    Reduce(ReduceArgs),
    /// Print an archive's parameters and dimensions as JSON.
    Info {
        archive: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Hopset,
    Shortcut,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConstantsArg {
    Desk,
    Paper,
}

impl From<ConstantsArg> for Constants {
    fn from(c: ConstantsArg) -> Self {
        match c {
            ConstantsArg::Desk => Constants::Desk,
            ConstantsArg::Paper => Constants::Paper,
        }
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: Family,
    #[arg(long)]
    pub n: u64,
    /// Hopset budget parameter (defaults to n).
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "desk")]
    pub constants: ConstantsArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Override the number of layers (hopset).
    #[arg(long)]
    pub layers: Option<u64>,
    /// Override q (hopset).
    #[arg(long)]
    pub q: Option<u64>,
    /// Override the edge span X (hopset).
    #[arg(long)]
    pub edge_span: Option<u64>,
    /// Replace each node by a chain so the graph has this many nodes (hopset).
    #[arg(long)]
    pub expand_to: Option<u64>,
    /// Apply the undirected +W reduction (hopset).
    #[arg(long)]
    pub undirected: bool,
    /// Override the radius r (shortcut).
    #[arg(long)]
    pub r: Option<u64>,
    /// Override the constant in r (shortcut).
    #[arg(long)]
    pub c_r: Option<f64>,
    /// Override the constant in the truncation length (shortcut).
    #[arg(long)]
    pub c_hat: Option<f64>,
    /// Resample or retry budget.
    #[arg(long)]
    pub max_attempts: Option<u32>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum Suite {
    Unique,
    Overlap,
    Split,
    PairBounds,
    All,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    pub archive: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub suite: Vec<Suite>,
    /// JSON report path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Check this many random path pairs instead of all of them.
    #[arg(long)]
    pub sample: Option<usize>,
    /// Monte Carlo resamples for the split suite.
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    /// Standard errors of slack in statistical checks.
    #[arg(long, default_value_t = 3.0)]
    pub z: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    pub archive: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "folklore,greedy,random")]
    pub adversary: Vec<String>,
    /// Budgets: integers or p, p/2, p/4 (p = half the number of critical paths).
    #[arg(long, value_delimiter = ',', default_value = "p/4,p/2,p")]
    pub budget: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Add a wall-time column (makes the CSV run-dependent).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    /// An archive directory or a graph file.
    pub input: PathBuf,
    #[arg(long)]
    pub x: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Far pairs checked against the stitched-distance bound.
    #[arg(long, default_value_t = 100)]
    pub pairs: usize,
    /// Budget of a folklore shortcut set placed on the reduced graph.
    #[arg(long, default_value_t = 0)]
    pub h1_budget: u64,
    #[arg(long)]
    pub max_attempts: Option<u32>,
}

/// What a command reports back to `main`.
pub enum Outcome {
    Ok,
    SuiteFailed,
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::InvalidParams(_)) => 2,
        Some(Error::ResampleExhausted { .. }) => 3,
        Some(Error::Format(_) | Error::Io(_) | Error::Json(_)) => 4,
        Some(Error::RetryExhausted { .. }) => 5,
        Some(Error::Overflow(_)) => 6,
        Some(Error::Invariant(_) | Error::NoPath { .. } | Error::InvalidProposal(_)) => 1,
        None if e.downcast_ref::<std::io::Error>().is_some() => 4,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Attack(a) => attack::attack(&a),
        Command::Reduce(a) => commands::reduce(&a),
        Command::Info { archive } => commands::info(&archive),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::SuiteFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
