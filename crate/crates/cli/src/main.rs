//! `curvcut`: curvature profiles, cutoff evolutions and theorem checks from the command line.

mod commands;
mod inputs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "curvcut", version, about = "Bakry-Émery curvature and cutoff heat flow on weighted graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Curvature at every vertex
    Curvature,
    /// Trace the heat flow and the cutoff flow of a field
    Evolve,
    /// Run the property suite, gradient estimate and distance bound
    Verify,
    /// Check the distance bound only
    Bound,
    /// Gaps to the heat flow along a shrinking sequence of exception sets
    Exhaust,
    /// Write a generated graph as an edge list
    Gen,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Opts {
    /// Edge list file with `u v w` lines
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Generated graph such as `cycle:6` or `erdos-renyi:10,0.4,7`
    #[arg(long = "gen", global = true, value_name = "FAMILY:PARAMS")]
    pub generate: Option<String>,
    /// `unit`, `degree` or a file with `v m` lines
    #[arg(long, global = true, default_value = "unit")]
    pub measure: String,
    /// Exception set: a file with one label per line or a comma separated list; repeat for `exhaust`
    #[arg(long = "w", global = true, value_name = "PATH|LIST")]
    pub w: Vec<String>,
    /// A file with `v value` lines, `random:SEED` or `plateau:SEED`
    #[arg(long, global = true)]
    pub field: Option<String>,
    #[arg(long, global = true)]
    pub t: Option<f64>,
    /// Comma separated increasing times
    #[arg(long, global = true, value_name = "CSV")]
    pub grid: Option<String>,
    /// A positive real or `inf`
    #[arg(long, global = true, default_value = "inf")]
    pub dimension: String,
    /// Put vertices with curvature below this value into the exception set
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "tol-heat", global = true, default_value_t = 1e-12)]
    pub tol_heat: f64,
    #[arg(long = "tol-partition", global = true, default_value_t = 1e-8)]
    pub tol_partition: f64,
    /// Output directory
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
}

/// Outcome classes that map onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Bad flag or unreadable input: exit 2.
    Usage(String),
    /// A checked inequality failed or a numerical stage gave up: exit 1.
    Check(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Check(m) => f.write_str(m),
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("CURVCUT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("CURVCUT_THREADS: expected a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("CURVCUT_THREADS: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| commands::run(cli.command, &cli.opts));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(m)) => {
            eprintln!("curvcut: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("curvcut: {m}");
            ExitCode::from(2)
        }
    }
}
