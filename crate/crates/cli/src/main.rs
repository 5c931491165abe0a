//! Experiment runner: `run` a config file, `list` the built-in experiments,
//! or `reproduce` a built-in by name. Exit status is nonzero iff any enabled
//! check fails (1) or the run errors out (2).

use clap::{Args, Parser, Subcommand};
use exmc::experiments::{self, ExperimentConfig, RunOptions};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "exmc",
    about = "Exchange-algorithm samplers and exact verification for doubly-intractable posteriors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Bound the internal parallelism.
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for trace/report output (default: ./runs).
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config file.
    Run {
        config: PathBuf,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// List the built-in experiments and the claims they exercise.
    List,
    /// Run a built-in experiment by name.
    Reproduce {
        name: String,
        #[command(flatten)]
        flags: RunFlags,
    },
}

fn options(flags: &RunFlags) -> RunOptions {
    RunOptions {
        out_dir: flags.out_dir.clone(),
        threads: flags.threads,
        seed_override: flags.seed,
    }
}

fn execute(config: &ExperimentConfig, flags: &RunFlags) -> ExitCode {
    match experiments::run_experiment(config, &options(flags)) {
        Ok(outcome) => {
            for check in &outcome.report.checks {
                println!(
                    "[{}] {:?}: {}",
                    if check.passed { "PASS" } else { "FAIL" },
                    check.id,
                    check.summary
                );
            }
            println!(
                "{}: {} (outputs in {})",
                outcome.report.name,
                if outcome.passed { "PASS" } else { "FAIL" },
                outcome.out_dir.display()
            );
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, flags } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(text) => text,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            match ExperimentConfig::from_toml(&text) {
                Ok(config) => execute(&config, &flags),
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Command::List => {
            for entry in experiments::list_experiments() {
                let checks: Vec<String> =
                    entry.checks.iter().map(|c| format!("{c:?}")).collect();
                println!("{:<20} {}", entry.name, entry.claim);
                println!("{:<20} checks: {}", "", checks.join(", "));
            }
            ExitCode::SUCCESS
        }
        Command::Reproduce { name, flags } => match experiments::builtin(&name) {
            Some(config) => execute(&config, &flags),
            None => {
                eprintln!(
                    "error: no built-in experiment named `{name}`; try `exmc list`"
                );
                ExitCode::from(2)
            }
        },
    }
}
