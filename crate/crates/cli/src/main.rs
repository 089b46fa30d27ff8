//! Command-line orchestration: validate input directories, run the
//! baseline + sweep + analytics pipeline, and write file-based outputs.

mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "ldesvc", version, about = "LDES economic-viability pipeline")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check input tables and invariants without solving anything.
    Validate {
        /// State directory, or a directory of per-state subdirectories.
        input_dir: PathBuf,
        /// Only these states (subdirectory names).
        #[arg(long, value_delimiter = ',')]
        states: Vec<String>,
    },
    /// Solve the baseline and the viability sweep, then write reports.
    Run(RunArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// State directory, or a directory of per-state subdirectories.
    input_dir: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Only these states (subdirectory names).
    #[arg(long, value_delimiter = ',')]
    states: Vec<String>,
    /// Explicit LDES power grid in MW; default is a log-spaced grid with
    /// refinement around the running maximum.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<f64>,
    /// Override the LDES duration, hours.
    #[arg(long)]
    duration_h: Option<f64>,
    /// Override the LDES round-trip efficiency.
    #[arg(long)]
    rte: Option<f64>,
    /// Seed for generator clustering.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// LP backend: microlp or simplex.
    #[arg(long, default_value = "microlp")]
    backend: String,
    /// Worker threads for states and sweep points.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Also write the models in LP text format.
    #[arg(long)]
    export_lp: bool,
}

/// 0 success, 2 validation, 3 solve failure, 4 I/O.
fn exit_code(err: &ldesvc_core::Error) -> u8 {
    use ldesvc_core::Error::*;
    match err {
        Io { .. } | Csv { .. } => 4,
        Validation(_) | Config(_) | Argument(_) | State(_) => 2,
        Solve { .. } | Consistency(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Validate { input_dir, states } => pipeline::cmd_validate(&input_dir, &states),
        Cmd::Run(args) => pipeline::cmd_run(&args),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
