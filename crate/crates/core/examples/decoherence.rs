//! Depumping and imperfect homodyne detection: variable-strength against
//! fixed `kappa = 1` coupling.
//!
//! `cargo run --release --example decoherence -- [depth] [eta_hd]`

use gaussify::protocol::{run_pair, Decoherence, OpticalDepth, ProtocolKind};
use gaussify::{Error, GaussianState};

fn main() -> gaussify::Result<()> {
    let mut args = std::env::args().skip(1);
    let depth: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let eta_hd: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let decoherence = Decoherence { depth: OpticalDepth::Finite(depth), eta_hd };
    let vacuum = GaussianState::vacuum(1)?;
    let light = GaussianState::two_mode_squeezed(0.5);
    println!("   M  variable    fixed");
    for m in 1..=6 {
        let en = |kind| match run_pair(m, kind, &vacuum, &light, decoherence) {
            Ok(run) => Ok(format!("{:.6}", run.final_log_negativity().unwrap_or(f64::NAN))),
            Err(Error::Infeasible { .. }) => Ok("infeasible".to_string()),
            Err(e) => Err(e),
        };
        println!("{m:>4}  {:<10}  {}", en(ProtocolKind::Variable { c0: 1.0 })?, en(ProtocolKind::FixedKappa)?);
    }
    Ok(())
}
