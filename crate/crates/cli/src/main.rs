//! `meshgcn`: decimation hierarchies, decoder training on synthetic data,
//! inference, and evaluation from one binary.
//!
//! Exit codes are a stable scripting contract: 0 success, 1 I/O failure,
//! 2 validation failure (bad flags, malformed input, mismatched shapes),
//! 3 numerical failure (divergence, degenerate geometry).

mod cmd_decimate;
mod cmd_eval;
mod cmd_hierarchy;
mod cmd_infer;
mod cmd_train_toy;
mod common;

use clap::{Parser, Subcommand};
use meshgcn_core::{CoreError, Result};

#[derive(Parser, Debug)]
#[command(name = "meshgcn", version, about = "Mesh regression toolkit: graph-convolutional decoding over decimation hierarchies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    Decimate(cmd_decimate::DecimateArgs),
    Hierarchy(cmd_hierarchy::HierarchyArgs),
    TrainToy(cmd_train_toy::TrainToyArgs),
    Infer(cmd_infer::InferArgs),
    Eval(cmd_eval::EvalArgs),
}

fn exit_code(err: &CoreError) -> i32 {
    match err {
        CoreError::Io(_) => 1,
        CoreError::Parse { .. } | CoreError::InvalidArgument(_) | CoreError::ShapeMismatch(_) => 2,
        CoreError::Numerical(_) => 3,
    }
}

/// Applies `MESHGCN_THREADS` to the global worker pool (0 or unset = auto).
/// Results never depend on the thread count; this only caps CPU use.
fn configure_threads() -> Result<()> {
    let raw = match std::env::var("MESHGCN_THREADS") {
        Ok(raw) => raw,
        Err(_) => return Ok(()),
    };
    let threads: usize = raw.trim().parse().map_err(|e| {
        CoreError::invalid(format!("MESHGCN_THREADS must be a non-negative integer, got {raw:?}: {e}"))
    })?;
    if threads == 0 {
        return Ok(());
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CoreError::invalid(format!("cannot configure {threads} worker threads: {e}")))
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Decimate(args) => cmd_decimate::run(args),
        Command::Hierarchy(args) => cmd_hierarchy::run(args),
        Command::TrainToy(args) => cmd_train_toy::run(args),
        Command::Infer(args) => cmd_infer::run(args),
        Command::Eval(args) => cmd_eval::run(args),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = configure_threads().and_then(|()| run(cli.command)) {
        eprintln!("error: {err}");
        std::process::exit(exit_code(&err));
    }
}
