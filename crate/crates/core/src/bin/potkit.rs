use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use potkit::experiments::{describe, run, ExperimentConfig, Scenario};
use potkit::Error;

#[derive(Parser)]
#[command(name = "potkit", version, about = "Seeded potential-theory experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write CSV/JSON artifacts plus manifest.json.
    Run {
        scenario: String,
        /// TOML key-value file; defaults are used for missing keys.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print what a scenario exercises and its parameter schema.
    Describe { scenario: String },
}

fn execute(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Describe { scenario } => {
            println!("{}", describe(scenario.parse::<Scenario>()?)?);
        }
        Command::Run {
            scenario,
            config,
            seed,
            out,
        } => {
            let scenario: Scenario = scenario.parse()?;
            let cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
                    ExperimentConfig::from_toml(scenario, &text)?
                }
                None => ExperimentConfig::defaults(scenario),
            }
            .with_cli(seed, out);
            let manifest = run(&cfg)?;
            for stage in &manifest.stages {
                eprintln!("{:>14}  {:8.3} s", stage.stage, stage.seconds);
            }
            for file in &manifest.outputs {
                println!("{}", manifest.out_dir.join(&file.name).display());
            }
            println!("{}", manifest.out_dir.join("manifest.json").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else if matches!(e, Error::Io(_)) {
                ExitCode::from(1)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
