use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod format;
mod validate;

use config::RunConfig;
use error::CliError;
use validate::Level;

/// Picard solver for Hilfer-Hadamard fractional initial value problems.
#[derive(Parser)]
#[command(name = "hpd", version)]
struct Cli {
    /// Worker threads for the quadrature loops (0 = one per core).
    #[arg(long, global = true, env = "HPD_THREADS", default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Run configuration, or a report.json from an earlier solve.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides output.dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the growth and Lipschitz hypotheses.
    Check(RunArgs),
    /// Run the iteration and write solution.csv and report.json.
    Solve(RunArgs),
    /// Write the error-bound series to bounds.csv.
    Bounds(RunArgs),
    /// Run the built-in oracle suites.
    Validate {
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Corrupt one quadrature weight (self-test of the suite).
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn load(args: &RunArgs) -> Result<RunConfig, CliError> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.output_dir.clone_from(out);
    }
    Ok(config)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Check(args) => commands::check(load(&args)?),
        Command::Solve(args) => commands::solve(load(&args)?),
        Command::Bounds(args) => commands::bounds(load(&args)?),
        Command::Validate { level, inject_fault } => validate::validate(level, inject_fault),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
