use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gaussify::experiments::{default_output, run_to_files, ExperimentId, RunError, SpecError, SweepSpec};

/// Regenerates the sweep data behind each figure as CSV.
#[derive(Parser)]
#[command(name = "gaussify", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        experiment: String,
        /// TOML config; experiment defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// CSV path; defaults to $GAUSSIFY_OUT_DIR/<experiment>.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write <out>.json.
        #[arg(long)]
        json: bool,
        /// Override a config key, e.g. `--set sigma=[0.5,1.0]`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the experiment ids.
    List,
}

fn run(
    experiment: &str,
    config: Option<PathBuf>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    json: bool,
    mut overrides: Vec<String>,
) -> Result<(), RunError> {
    let id: ExperimentId = experiment.parse()?;
    let text = match &config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| SpecError(vec![format!("cannot read config {}: {e}", path.display())]))?,
        None => String::new(),
    };
    if let Some(seed) = seed {
        overrides.push(format!("seed={seed}"));
    }
    let spec = SweepSpec::from_config(id, &text, &overrides)?;
    let out = out.unwrap_or_else(|| default_output(id));
    let sweep = run_to_files(&spec, &out, json)?;
    eprintln!("{id}: {} rows written to {}", sweep.table.len(), out.display());
    Ok(())
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::List => {
            for id in ExperimentId::ALL {
                println!("{:<20} {}", id.as_str(), id.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run { experiment, config, seed, out, json, overrides } => {
            match run(&experiment, config, seed, out, json, overrides) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
    }
}
