//! Gaussian closed forms against the truncated number-basis oracle.
//!
//! `cargo run --release --example fock_oracle -- [n_max]`

use gaussify::fock::{gaussian_to_fock, negativity_fock, overlap_fock, purity_fock};
use gaussify::symplectic::{gaussian_overlap, log_negativity, purity_gaussian};
use gaussify::{GaussianChannel, GaussianState};

fn main() -> gaussify::Result<()> {
    let n_max: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(40);
    let tmsv = GaussianState::two_mode_squeezed(0.6);
    let lossy = GaussianChannel::loss_thermal(2, 0.3)?.apply(&tmsv)?;
    let (a, report) = gaussian_to_fock(&tmsv, n_max)?;
    let (b, _) = gaussian_to_fock(&lossy, n_max)?;
    println!("trace deficit  {:.3e}", report.trace_deficit);
    println!("quantity          Gaussian     Fock");
    println!("purity (lossy)    {:.8}  {:.8}", purity_gaussian(&lossy)?, purity_fock(&b));
    println!("overlap           {:.8}  {:.8}", gaussian_overlap(&tmsv, &lossy)?, overlap_fock(&a, &b)?);
    println!("E_N (TMSV)        {:.8}  {:.8}", log_negativity(&tmsv)?, negativity_fock(&a)?);
    println!("E_N (lossy)       {:.8}  {:.8}", log_negativity(&lossy)?, negativity_fock(&b)?);
    Ok(())
}
