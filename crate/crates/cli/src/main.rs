use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use deterrence_cli::{commands, config::RunConfig, CliError};

/// Deterrence pipeline: survey estimation, welfare evaluation, strategy
/// optimization, phase sweeps, and Monte-Carlo validation.
#[derive(Parser)]
#[command(name = "deterrence", version, about)]
struct Cli {
    /// Path to the run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the simulation seed from the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory for reports and tables.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads for grid sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    /// Treat degenerate-strategy and phase-failure results as errors
    /// (exit code 3).
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate population trait distributions from a survey CSV.
    FitSurvey {
        /// Survey CSV path.
        #[arg(long)]
        input: PathBuf,
    },
    /// Evaluate the welfare function in all three tiers.
    EvalWelfare,
    /// Solve the reduced optimization for the optimal strategy.
    Optimize,
    /// Sweep harshness and fine across the phase boundary.
    PhaseSweep,
    /// Run the Monte-Carlo population simulator.
    Simulate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    std::fs::create_dir_all(&cli.out)?;
    let load_config = || -> Result<RunConfig, CliError> {
        let path = cli
            .config
            .as_ref()
            .ok_or_else(|| CliError::Validation("this command needs --config PATH".into()))?;
        RunConfig::load(path)
    };
    match &cli.command {
        Command::FitSurvey { input } => {
            let config = match &cli.config {
                Some(path) => Some(RunConfig::load(path)?),
                None => None,
            };
            commands::fit_survey::run(config.as_ref(), input, &cli.out)
        }
        Command::EvalWelfare => commands::eval_welfare::run(&load_config()?, &cli.out, cli.strict),
        Command::Optimize => commands::optimize::run(&load_config()?, &cli.out, cli.strict),
        Command::PhaseSweep => commands::phase_sweep::run(&load_config()?, &cli.out, cli.threads),
        Command::Simulate => commands::simulate::run(&load_config()?, &cli.out, cli.seed),
    }
}
