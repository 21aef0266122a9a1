//! Finite acceptance window: success probability and total variance by
//! Monte Carlo over measurement records.
//!
//! `cargo run --release --example purify_window -- [q_threshold] [steps] [trajectories]`

use gaussify::mixture::{purify_run_window, PurificationConfig};

fn main() -> gaussify::Result<()> {
    let mut args = std::env::args().skip(1);
    let q: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.2);
    let steps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let samples: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2000);
    let mut config = PurificationConfig::new(steps, 0.5, 1.0, (2.0 / std::f64::consts::PI).sqrt())?;
    config.q_threshold = q;
    config.mc_samples = samples;
    config.rng_seed = 2024;
    eprintln!("phase nodes {}", config.phase.nodes);
    let start = std::time::Instant::now();
    let result = purify_run_window(&config)?;
    println!("step  I           success");
    for t in &result.trace {
        println!("{:>4}  {:.6}  {:.6e}", t.step, t.total_variance, t.success_probability.unwrap_or(f64::NAN));
    }
    println!(
        "I = {:.6} +- {:.6}, P = {:.6}, success = {:.6e} +- {:.2e}",
        result.last().total_variance,
        result.total_variance_standard_error.unwrap_or(f64::NAN),
        result.last().purity.unwrap_or(f64::NAN),
        result.success_probability,
        result.success_standard_error.unwrap_or(f64::NAN),
    );
    eprintln!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
