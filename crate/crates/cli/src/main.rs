use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use qcommit_cli::output::{machine_records, summary, write_outputs};
use qcommit_cli::{list_scenarios, load_config, run_experiment, CliError, Format};

/// Simulator and security analysis for relativistic bit commitment.
#[derive(Parser)]
#[command(name = "qcommit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a shipped scenario by name.
    Run {
        config: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Directory for report, transcript and summary files.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// List shipped scenarios.
    List,
    /// Parse and check a config without running it.
    Validate {
        config: String,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(clap::Args)]
struct Overrides {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
}

fn resolve(spec: &str, o: &Overrides) -> Result<qcommit_cli::Resolved, CliError> {
    let mut config = load_config(spec)?;
    if let Some(seed) = o.seed {
        config.seed = seed;
    }
    if let Some(trials) = o.trials {
        config.trials = trials;
    }
    config.resolve()
}

fn execute(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::List => {
            for (name, description) in list_scenarios() {
                println!("{name:<20} {description}");
            }
            Ok(0)
        }
        Command::Validate { config, overrides } => {
            let r = resolve(&config, &overrides)?;
            let plan = qcommit::protocol::plan_schedule(&r.params, &r.scenario)?;
            let violations = qcommit::spacetime::validate_schedule(&plan.schedule);
            println!(
                "{}: ok ({:?}, M = {}, N0 = {}, seed {}, {} trials, {} messages, t_c = {})",
                r.config.scenario,
                r.config.experiment,
                r.params.m,
                r.params.n0,
                r.config.seed,
                r.config.trials,
                plan.schedule.messages.len(),
                plan.schedule.t_c
            );
            for v in &violations {
                println!("  schedule will abort: {v}");
            }
            Ok(0)
        }
        Command::Run { config, overrides, out, format } => {
            let r = resolve(&config, &overrides)?;
            let format = format.or(r.config.output.format).unwrap_or_default();
            let dir = out.or_else(|| r.config.output.dir.clone());
            let start = Instant::now();
            let result = run_experiment(r)?;
            let elapsed = start.elapsed();
            match &dir {
                Some(dir) => {
                    for f in write_outputs(&result, dir, format)? {
                        eprintln!("wrote {}", f.display());
                    }
                    if format.summary() {
                        print!("{}", summary(&result));
                    }
                }
                None if format == Format::Machine => print!("{}", machine_records(&result)),
                None => print!("{}", summary(&result)),
            }
            eprintln!("finished in {:.2} s", elapsed.as_secs_f64());
            Ok(result.status().exit_code())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
