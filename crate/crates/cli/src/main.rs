//! `scs`: command-line front end for the sufficient control set toolkit.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Environment variable that sets the worker-thread count.
pub const WORKERS_ENV: &str = "SCS_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "scs", version, about = "Minimum sufficient control sets in super-modular games")]
pub struct Cli {
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for output files; results go to stdout when omitted.
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,
    /// Output style for tabular results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Plain,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a graph from a standard family.
    Generate(GenerateArgs),
    /// Check whether a set is a sufficient control set.
    Verify(VerifyArgs),
    /// Exhaustive search for minimum sufficient control sets.
    Oracle(OracleArgs),
    /// Randomized search with the ε-chain.
    Search(SearchArgs),
    /// Closed-form optimum for thresholds on the complete graph.
    Analytic(AnalyticArgs),
    /// Build the gadget graph of a 3-CNF formula.
    ReduceSat(ReduceSatArgs),
    /// Check the SAT / control-set equivalence on small formulas.
    VerifyReduction(VerifyReductionArgs),
    /// Erdős–Rényi sweep comparing chain, oracle and degree heuristic.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    Complete,
    Ring,
    Path,
    Grid,
    Tree,
    Er,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub family: FamilyName,
    /// Node count (complete, ring, path, er).
    #[arg(long)]
    pub n: Option<usize>,
    /// Side length (grid).
    #[arg(long)]
    pub k: Option<usize>,
    /// Dimension (grid).
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Edge probability (er).
    #[arg(long)]
    pub p: Option<f64>,
    /// Parent of each node, `-` for the root, e.g. `-,0,0,1` (tree).
    #[arg(long, allow_hyphen_values = true)]
    pub parents: Option<String>,
    /// Write a coordination game with this common threshold instead of a bare graph.
    #[arg(long)]
    pub theta: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Game or graph file.
    pub game: PathBuf,
    /// Players forced to 1, e.g. `1,4,7`.
    #[arg(long, allow_hyphen_values = true)]
    pub set: String,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    pub game: PathBuf,
    /// Largest set size to examine (default: all players).
    #[arg(long)]
    pub budget: Option<usize>,
    /// Stop at the first optimal set instead of listing all of them.
    #[arg(long)]
    pub first: bool,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    pub game: PathBuf,
    #[arg(long, default_value = "3/10")]
    pub epsilon: String,
    /// Steps per walk (default 100·n²).
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    /// Write the best walk's `step,cardinality` trace to this file.
    #[arg(long)]
    pub emit_trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    /// One threshold per line.
    pub thresholds: PathBuf,
    /// Confirm the result with the exhaustive oracle (n <= 14).
    #[arg(long)]
    pub crosscheck: bool,
}

#[derive(Debug, Args)]
pub struct ReduceSatArgs {
    /// DIMACS CNF file.
    pub cnf: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyReductionArgs {
    /// DIMACS CNF file; omit with `--random`.
    #[arg(required_unless_present = "random")]
    pub cnf: Option<PathBuf>,
    /// Check this many random formulas instead.
    #[arg(long)]
    pub random: Option<usize>,
    /// Largest variable count for random formulas.
    #[arg(long, default_value_t = 6)]
    pub max_vars: usize,
    /// Largest clause count for random formulas.
    #[arg(long, default_value_t = 6)]
    pub max_clauses: usize,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// `dense` (p = 0.4), `sparse` (p = 4 ln n / n) or a fixed probability.
    #[arg(long, default_value = "dense")]
    pub family: String,
    /// Node counts, e.g. `10-20,30,40`.
    #[arg(long, default_value = "8-14")]
    pub n: String,
    #[arg(long, default_value_t = scs_core::experiments::DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = scs_core::experiments::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value = "3/10")]
    pub epsilon: String,
    /// Steps per walk (default 100·n²).
    #[arg(long)]
    pub steps: Option<u64>,
    /// Run the oracle only for n up to this value.
    #[arg(long, default_value_t = scs_core::experiments::DEFAULT_ORACLE_CUTOFF)]
    pub oracle_cutoff: usize,
    /// Leave runtime_ms empty so repeated runs give identical files.
    #[arg(long)]
    pub no_timing: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = commands::configure_workers() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
