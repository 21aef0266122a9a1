//! Phase-diffused two-mode squeezed light as a Gaussian mixture: damped
//! correlations, total variance, and the entanglement that survives in the
//! number basis.
//!
//! `cargo run --release --example dephased_light -- [r] [n_max]`

use gaussify::fock::{gaussianity, mixture_to_fock, negativity_fock};
use gaussify::mixture::{dephased_tmsv, total_variance_of, PhaseNoiseModel};

fn main() -> gaussify::Result<()> {
    let mut args = std::env::args().skip(1);
    let r: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let n_max: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);
    println!("sigma  <x_A x_B>   I           E_N (Fock)  G");
    for sigma in [0.0, 0.25, 0.5, 1.0, 1.5] {
        let light = dephased_tmsv(r, &PhaseNoiseModel::new(sigma, PhaseNoiseModel::DEFAULT_NODES)?)?;
        let (_, cov) = light.mean_cov()?;
        let (rho, _) = mixture_to_fock(&light, n_max)?;
        println!(
            "{sigma:<5}  {:.8}  {:.8}  {:.8}  {:.8}",
            cov[(0, 2)],
            total_variance_of(&light)?,
            negativity_fock(&rho)?,
            gaussianity(&light, n_max)?.gaussianity
        );
    }
    Ok(())
}
