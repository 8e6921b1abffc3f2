use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use einlab::commands::{self, CommandResult};
use einlab::config::LoadedConfig;
use einlab::error::{ErrorReport, LabError};

#[derive(Parser, Debug)]
#[command(name = "einlab", version, about = "Gauged curvature solver and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides `output.dir` from the configuration.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides the configuration's seed.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Only print errors.
    #[arg(long)]
    quiet: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the gauged equation for the configured right-hand side.
    Solve(Common),
    /// Build e = Ein(δ+h*) − Λδ from the configured bumps and write both fields.
    Manufacture(Common),
    /// Run the verification battery and print a pass/fail table.
    Checks(Common),
    /// Repeat the solve over the configured resolutions and tabulate residuals.
    Convergence(Common),
}

fn run(command: &Command, common: &Common) -> Result<CommandResult, LabError> {
    let loaded = LoadedConfig::load(&common.config, common.seed)?;
    let out = common
        .out
        .clone()
        .unwrap_or_else(|| loaded.resolve(&loaded.config.output.dir));
    match command {
        Command::Solve(_) => commands::solve::run(&loaded, &out),
        Command::Manufacture(_) => commands::manufacture::run(&loaded, &out),
        Command::Checks(_) => commands::checks::run(&loaded, &out),
        Command::Convergence(_) => commands::convergence::run(&loaded, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Solve(c) | Command::Manufacture(c) | Command::Checks(c) | Command::Convergence(c) => c,
    };
    let level = if common.quiet { "error" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    match run(&cli.command, common) {
        Ok(result) => {
            if !common.quiet {
                println!("{}", result.summary.trim_end());
            }
            ExitCode::from(result.outcome.code() as u8)
        }
        Err(err) => {
            let report = ErrorReport::from(&err);
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("error report serializes")
            );
            log::error!("{err}");
            ExitCode::from(err.outcome().code() as u8)
        }
    }
}
