//! Entanglement of two distant memories fed with two-mode squeezed light,
//! compared with the closed-form symplectic eigenvalue.
//!
//! `cargo run --release --example pair_entanglement -- [r] [n_bar] [c0]`

use gaussify::protocol::{pair_mu_squared, run_pair, Decoherence, ProtocolKind};
use gaussify::GaussianState;

fn main() -> gaussify::Result<()> {
    let mut args = std::env::args().skip(1);
    let r: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let n_bar: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.0);
    let c0: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let memory = GaussianState::thermal(n_bar)?;
    let light = GaussianState::two_mode_squeezed(r);
    println!("   M  E_N         E_N closed form");
    for m in [1, 2, 3, 5, 10, 20, 50, 100] {
        let run = run_pair(m, ProtocolKind::Variable { c0 }, &memory, &light, Decoherence::IDEAL)?;
        let closed = (-0.5 * pair_mu_squared(m, r, n_bar, c0).log2()).max(0.0);
        println!("{m:>4}  {:.8}  {closed:.8}", run.final_log_negativity().unwrap_or(f64::NAN));
    }
    println!("limit {:.6}", 2.0 * r / std::f64::consts::LN_2);
    Ok(())
}
