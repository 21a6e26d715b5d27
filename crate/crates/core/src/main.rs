//! `hwalk` — reproducible experiment driver over the harmonic-walk library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use harmonic_walk::report::{self, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "hwalk",
    about = "Fourier-analytic learning experiments over [b]^n",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args)]
struct RunArgs {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker count (echoed into the report; results do not depend on it).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Exact spectrum of a target, written as CSV.
    Transform(RunArgs),
    /// One spectral-quantity estimate from an oracle session.
    Estimate(RunArgs),
    /// End-to-end learning run emitting a hypothesis file.
    Learn(RunArgs),
    /// Distributional verification experiment (collision-decay sweep).
    Experiment(RunArgs),
    /// Field-wise diff of two run reports.
    Compare {
        report_a: PathBuf,
        report_b: PathBuf,
        /// Numeric comparison tolerance.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

fn execute_run(args: &RunArgs, command: Command) -> ExitCode {
    let outcome = (|| {
        let mut config = RunConfig::load(&args.config)?;
        config.command = command;
        if let Some(seed) = args.seed {
            config.seed = seed;
        }
        if let Some(workers) = args.workers {
            config.workers = workers;
        }
        report::run(&config, &args.out)
    })();
    let code = report::exit_code(&outcome);
    match &outcome {
        Ok(run_report) => match run_report.to_json() {
            Ok(json) => println!("{json}"),
            Err(e) => eprintln!("error: {e}"),
        },
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code as u8)
}

fn execute_compare(report_a: &PathBuf, report_b: &PathBuf, tolerance: f64) -> ExitCode {
    let outcome = (|| {
        let a = report::RunReport::load(report_a)?;
        let b = report::RunReport::load(report_b)?;
        report::compare(&a, &b, tolerance)
    })();
    match outcome {
        Ok(diffs) if diffs.is_empty() => {
            println!("reports agree within tolerance {tolerance}");
            ExitCode::SUCCESS
        }
        Ok(diffs) => {
            for d in &diffs {
                println!("{d}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        CliCommand::Transform(args) => execute_run(args, Command::Transform),
        CliCommand::Estimate(args) => execute_run(args, Command::Estimate),
        CliCommand::Learn(args) => execute_run(args, Command::Learn),
        CliCommand::Experiment(args) => execute_run(args, Command::Experiment),
        CliCommand::Compare {
            report_a,
            report_b,
            tolerance,
        } => execute_compare(report_a, report_b, *tolerance),
    }
}
