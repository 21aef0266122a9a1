//! Conditional purification of phase-diffused light in the narrow-window
//! limit.
//!
//! `cargo run --release --example purify_narrow -- [sigma] [steps] [n_max]`

use gaussify::mixture::{purify_run_narrow, PurificationConfig};

fn main() -> gaussify::Result<()> {
    let mut args = std::env::args().skip(1);
    let sigma: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let steps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(20);
    let mut config = PurificationConfig::new(steps, 0.5, sigma, (2.0 / std::f64::consts::PI).sqrt())?;
    if let Some(n_max) = args.next().and_then(|s| s.parse().ok()) {
        config.n_max = n_max;
    }
    let start = std::time::Instant::now();
    let result = purify_run_narrow(&config)?;
    println!("step  I           P           E_N         G");
    for t in std::iter::once(&result.input).chain(&result.trace) {
        println!(
            "{:>4}  {:.8}  {:.8}  {:.8}  {:.8}",
            t.step,
            t.total_variance,
            t.purity.unwrap_or(f64::NAN),
            t.log_negativity.unwrap_or(f64::NAN),
            t.gaussianity.unwrap_or(f64::NAN),
        );
    }
    eprintln!("elapsed {:.2?}", start.elapsed());
    Ok(())
}
