//! Runs an experiment sweep from a config string and prints the CSV.
//!
//! `cargo run --release --example sweep -- [experiment-id] [key=value ...]`

use gaussify::experiments::{run_experiment, ExperimentId, Metadata, SweepSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let id: ExperimentId = args.next().as_deref().unwrap_or("memory-entanglement").parse()?;
    let overrides: Vec<String> = args.collect();
    let spec = SweepSpec::from_config(id, "", &overrides)?;
    let sweep = run_experiment(&spec)?;
    let metadata = Metadata {
        tool: "sweep-example".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: id.to_string(),
        seed: spec.seed,
        spec: spec.to_config(),
    };
    print!("{}", sweep.table.to_csv(&metadata));
    eprintln!("{} rows, {} failed", sweep.table.len(), sweep.failed_rows);
    Ok(())
}
