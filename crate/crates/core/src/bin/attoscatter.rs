use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use attoscatter::cli::{self, RunOptions};
use attoscatter::Error;

#[derive(Parser)]
#[command(
    name = "attoscatter",
    version,
    about = "Finite-time scattering rates under dephasing"
)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Directory for CSV, summary and manifest files.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Also write tolerance_report.txt with per-point limit residuals.
    #[arg(long, global = true)]
    tolerance_report: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the sweep and write every requested output.
    Run { config: PathBuf },
    /// Print the timescale table for the [kinematics] section.
    Timescales { config: PathBuf },
    /// Check the K -> 0 and K -> infinity limits at every (q, tau_sc).
    Limits { config: PathBuf },
    /// Parse the config and build the model without running.
    Validate { config: PathBuf },
}

fn report(err: &Error) {
    match err {
        Error::SweepFailed(points) => {
            eprintln!("error: {} grid point(s) failed", points.len());
            for p in points {
                eprintln!("  {p}");
            }
        }
        other => eprintln!("error: {other}"),
    }
}

fn run(args: Args) -> Result<bool, Error> {
    match args.command {
        Command::Run { config } => {
            let cfg = cli::parse_config(&config)?;
            let options = RunOptions {
                out_dir: args.out_dir,
                threads: args.threads,
                tolerance_report: args.tolerance_report,
            };
            let manifest = cli::run_sweep(&cfg, &options)?;
            print!("{}", cli::summarize(&manifest));
            Ok(true)
        }
        Command::Timescales { config } => {
            let cfg = cli::parse_config(&config)?;
            let table = cli::timescale_table(&cfg)?;
            print!("{}", cli::sweep::timescales_csv(&table));
            Ok(true)
        }
        Command::Limits { config } => {
            let cfg = cli::parse_config(&config)?;
            let checks = cli::run_limit_checks(&cfg, args.threads)?;
            print!("{}", cli::tolerance_report(&checks, None));
            Ok(checks.iter().all(|c| {
                c.residual_a <= cli::sweep::LIMIT_A_TOLERANCE
                    && c.residual_b <= cli::sweep::LIMIT_B_TOLERANCE
            }))
        }
        Command::Validate { config } => {
            let cfg = cli::parse_config(&config)?;
            print!("{}", cli::validate_config(&cfg)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            report(&e);
            ExitCode::from(2)
        }
    }
}
