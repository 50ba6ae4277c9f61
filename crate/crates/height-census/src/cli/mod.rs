//! Command-line front end: clap argument types and the dispatch that wires
//! configuration files to the counting modules and the report writers.

pub mod config;
pub mod report;
pub mod runner;

use clap::{Args, Parser, Subcommand};
use config::{parse_config, CommandKind};
use runner::execute;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "height-census",
    version,
    about = "Exact height censuses for finitely generated subgroups of (Q*)^k"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Compute the polytope volume and leading constant of a group
    Volume(RunArgs),
    /// Count points with H(a₁x₁ + ⋯ + a_k x_k) ≤ X over a ladder of bounds
    Census(RunArgs),
    /// Count group elements with H(x) ≤ X over a ladder of bounds
    Hball(RunArgs),
    /// Count recurrence terms with H(u_n) ≤ X over a ladder of bounds
    Recurrence(RunArgs),
    /// Count representable values T_A(X) over a ladder of bounds
    Represent(RunArgs),
    /// Run the bundled verification suite
    Selftest,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Path to the TOML configuration file
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (overrides `output_dir` from the config)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sampler seed (overrides `seed` from the config)
    #[arg(long)]
    pub seed: Option<u64>,
}

fn run_command(kind: CommandKind, args: &RunArgs) -> i32 {
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.config.display());
            return 1;
        }
    };
    let mut parsed = match parse_config(kind, &text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    if let Some(seed) = args.seed {
        parsed.seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| parsed.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    match execute(&parsed, &out_dir) {
        Ok(outcome) => {
            println!(
                "{}: {} (artifacts in {})",
                kind.name(),
                outcome.verdict,
                out_dir.display()
            );
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn run_selftest() -> i32 {
    let results = crate::selftest::run_all();
    for result in &results {
        println!("{}", result.line());
    }
    if crate::selftest::all_pass(&results) {
        0
    } else {
        2
    }
}

/// Dispatch parsed arguments; returns the process exit code.
pub fn main_entry(cli: Cli) -> i32 {
    match &cli.command {
        CliCommand::Volume(args) => run_command(CommandKind::Volume, args),
        CliCommand::Census(args) => run_command(CommandKind::Census, args),
        CliCommand::Hball(args) => run_command(CommandKind::Hball, args),
        CliCommand::Recurrence(args) => run_command(CommandKind::Recurrence, args),
        CliCommand::Represent(args) => run_command(CommandKind::Represent, args),
        CliCommand::Selftest => run_selftest(),
    }
}
