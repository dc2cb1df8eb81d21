//! Batch experiment driver for the corrocert library.
//!
//! `corrocert <command> --config <file> [--out <dir>] [--seed <u64>]
//! [--deterministic]`
//!
//! Exit codes: 0 = ran to completion (a "criterion not satisfied" outcome is
//! data, not failure), 1 = usage or configuration error, 2 = internal
//! numeric failure.

use clap::{Parser, Subcommand};
use corrocert::config::ConfigMap;
use corrocert::experiment::{
    run_admissible, run_certify, run_landscape, run_mesh, run_noise_sweep, run_reconstruct,
    run_sweep_m, run_sweep_n, ExperimentSpec,
};
use corrocert::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "corrocert",
    about = "Certification and convex reconstruction experiments for the inverse Robin transmission problem"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Key-value configuration file (geometry, bounds, solver, ranges).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for CSV/JSON artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Fix evaluation order for byte-stable outputs across runs.
    #[arg(long, global = true)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate, validate and export the mesh.
    Mesh,
    /// Evaluate both certification criteria for one geometry.
    Certify,
    /// Minimal electrode count per resolution dimension.
    SweepN,
    /// Stability constant against electrode count at fixed resolution.
    SweepM,
    /// Reconstruct one coefficient (seeded truth or measured data file).
    Reconstruct,
    /// Convex vs least-squares reconstruction error over a coefficient grid.
    Landscape,
    /// Reconstruction error against the noise level.
    NoiseSweep,
    /// Admissible-set grids for exact and noisy data.
    Admissible,
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, Error> {
    let config_path = cli
        .config
        .ok_or_else(|| Error::Config("--config <file> is required".into()))?;
    let map = ConfigMap::from_file(&config_path)?;
    let spec = ExperimentSpec::from_config(&map, cli.out, cli.seed, cli.deterministic)?;
    let files = match cli.command {
        Command::Mesh => run_mesh(&spec)?.files,
        Command::Certify => {
            let summary = run_certify(&spec)?;
            println!(
                "criterion C=1: lambda = {:e}, satisfied = {}",
                summary.c1.lambda, summary.c1.satisfied
            );
            println!(
                "criterion C=n-1: lambda = {:e}, satisfied = {}",
                summary.cn1.lambda, summary.cn1.satisfied
            );
            summary.files
        }
        Command::SweepN => run_sweep_n(&spec)?.files,
        Command::SweepM => run_sweep_m(&spec)?.files,
        Command::Reconstruct => {
            let summary = run_reconstruct(&spec)?;
            if let Some(err) = summary.err_inf {
                println!("reconstruction error (inf-norm): {err:e}");
            }
            println!("status: {}", summary.solution.status);
            summary.files
        }
        Command::Landscape => {
            let summary = run_landscape(&spec)?;
            println!(
                "max SDP error: {:e}, max LSQ error: {:e}",
                summary.max_sdp_err_2, summary.max_lsq_err_2
            );
            summary.files
        }
        Command::NoiseSweep => {
            let summary = run_noise_sweep(&spec)?;
            println!(
                "lambda (C=n-1) = {:e}, satisfied = {}",
                summary.lambda_cn1, summary.criterion_satisfied
            );
            summary.files
        }
        Command::Admissible => run_admissible(&spec)?.files,
    };
    Ok(files)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are successful exits
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ (Error::Config(_) | Error::Parse(_))) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
