use clap::{Parser, Subcommand};
use skm_cli::commands::{dispatch, Command};
use skm_cli::config::parse_config;
use skm_cli::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

/// Singular Kuramoto lattice laboratory.
#[derive(Parser)]
#[command(name = "skm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Flat key=value config file; omitted = all defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file for the command's artifact.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    /// One simulation; writes the trace CSV.
    Simulate(RunArgs),
    /// One-axis parameter sweep; writes the sweep CSV.
    Sweep(RunArgs),
    /// Mesh-refinement convergence study; writes the convergence CSV.
    Converge(RunArgs),
    /// Concentration-limit study; writes (eps, interior error) CSV.
    Mollify(RunArgs),
    /// Analytic bound report for the configured scenario.
    Bounds(RunArgs),
    /// Runs the full property/oracle suite; nonzero exit on any failure.
    Verify(RunArgs),
}

fn run() -> Result<(), CliError> {
    // worker-count override for parallel experiment runs (defaults to the
    // available cores when unset)
    if let Ok(v) = std::env::var("SKM_WORKERS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = skm_core::configure_workers(n);
            }
        }
    }
    let cli = Cli::parse();
    let (cmd, args) = match &cli.command {
        Cmd::Simulate(a) => (Command::Simulate, a),
        Cmd::Sweep(a) => (Command::Sweep, a),
        Cmd::Converge(a) => (Command::Converge, a),
        Cmd::Mollify(a) => (Command::Mollify, a),
        Cmd::Bounds(a) => (Command::Bounds, a),
        Cmd::Verify(a) => (Command::Verify, a),
    };
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path)?,
        None => String::new(),
    };
    let cfg = parse_config(&text)?;
    dispatch(cmd, &cfg, &args.out)
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("skm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
