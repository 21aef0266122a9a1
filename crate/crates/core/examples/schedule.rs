//! The variable-strength coupling schedule: C_M / C_0 and the total coupling.
//!
//! `cargo run --release --example schedule -- [steps] [c0]`

use gaussify::protocol::coupling_sequence;

fn main() -> gaussify::Result<()> {
    let mut args = std::env::args().skip(1);
    let steps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(12);
    let c0: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1.0);
    let schedule = coupling_sequence(steps, c0)?;
    println!("step  coupling     kappa      gain       C_j/C_0    K_tot^2");
    let sums = schedule.coupling_partial_sums();
    for (s, k2) in schedule.steps.iter().zip(&sums) {
        println!(
            "{:>4}  {:<11}  {:.6}  {:.6}  {:.6}  {:.6}",
            s.index,
            format!("{:?}", s.coupling),
            s.kappa,
            s.gain,
            schedule.c_seq[s.index] / c0,
            k2
        );
    }
    println!("sqrt(pi/2) = {:.6}", (std::f64::consts::PI / 2.0).sqrt());
    Ok(())
}
