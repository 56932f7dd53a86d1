//! `momidx` — matrix indexes of moment matrices from the command line.
//!
//! JSON config in, JSON report plus CSV sequences out; no interactive mode.
//! Exit codes: 0 success, 2 when every produced answer is Inconclusive,
//! 1 on errors.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

mod config;
mod report;
mod run;

#[derive(Parser)]
#[command(name = "momidx", version, about = "matrix indexes of Hermitian moment matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
pub struct JobArgs {
    /// Path to the JSON job config, or '-' to read it from stdin.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output_dir; default '.').
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cap the truncation order, overriding the config's 'n'.
    #[arg(long)]
    max_order: Option<usize>,
    /// Echoed into the report for provenance; computations are deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Index sequences lambda_n, gamma_n, alpha_n (+ gamma_{z0,n} with z0) and the inequality audit.
    Indexes(JobArgs),
    /// Szegő-condition verdict for a measure on the unit circle.
    Szego(JobArgs),
    /// Polynomial-density verdict for a measure on a Jordan curve.
    Density(JobArgs),
    /// Bounded-point-evaluation verdict at z0, optionally with the conjugation cross-check.
    Bpe(JobArgs),
    /// Grid of gamma_{z0,N} values for heatmaps.
    Map(JobArgs),
    /// Pushforward of a measure under z -> alpha z + beta, with the conjugated section.
    Transform(JobArgs),
    /// Moment matrix section as explicit-matrix JSON.
    Moments(JobArgs),
}

fn main() {
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Indexes(a) => ("indexes", a),
        Command::Szego(a) => ("szego", a),
        Command::Density(a) => ("density", a),
        Command::Bpe(a) => ("bpe", a),
        Command::Map(a) => ("map", a),
        Command::Transform(a) => ("transform", a),
        Command::Moments(a) => ("moments", a),
    };
    match run::run(name, args) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}
