use nalgebra::{DMatrix, Matrix2};

/// `C_{2N} = sqrt(2N+1) (2^N N!)^2 / (2N+1)! C_0`, evaluated as the
/// equivalent double-factorial product `sqrt(2N+1) prod_{k<=N} 2k/(2k+1)`.
pub fn c_even_closed_form(n: usize, c0: f64) -> f64 {
    let prod: f64 = (1..=n).map(|k| (2 * k) as f64 / (2 * k + 1) as f64).product();
    ((2 * n + 1) as f64).sqrt() * prod * c0
}

/// Memory covariance after `M` ideal steps with inputs `gamma_a`, `gamma_l`:
/// `S_A gamma_A S_A^T / (M+1) + M S_L gamma_L S_L^T / (M+1)` with
/// `S_A = diag(C_M/C_0, C_0/C_M)` and `S_L = diag(C_M, 1/C_M)`.
///
/// For several sites the same squeezing acts on each mode.
pub fn mapped_covariance(gamma_a: &DMatrix<f64>, gamma_l: &DMatrix<f64>, m: usize, c0: f64, c_m: f64) -> DMatrix<f64> {
    let sites = gamma_a.nrows() / 2;
    let sa = Matrix2::new(c_m / c0, 0.0, 0.0, c0 / c_m);
    let sl = Matrix2::new(c_m, 0.0, 0.0, 1.0 / c_m);
    let mut big_sa = DMatrix::zeros(2 * sites, 2 * sites);
    let mut big_sl = DMatrix::zeros(2 * sites, 2 * sites);
    for s in 0..sites {
        big_sa.view_mut((2 * s, 2 * s), (2, 2)).copy_from(&sa);
        big_sl.view_mut((2 * s, 2 * s), (2, 2)).copy_from(&sl);
    }
    let mf = m as f64;
    (&big_sa * gamma_a * big_sa.transpose()) / (mf + 1.0) + (&big_sl * gamma_l * big_sl.transpose()) * (mf / (mf + 1.0))
}

/// Squared lower symplectic eigenvalue of the partially transposed memory
/// pair after `M` ideal steps on TMSV(r) light with thermal(n_bar) memories.
pub fn pair_mu_squared(m: usize, r: f64, n_bar: f64, c0: f64) -> f64 {
    let mf = m as f64;
    let t = 2.0 * n_bar + 1.0;
    (mf * mf * (-4.0 * r).exp() + mf * t * (c0 * c0 + 1.0 / (c0 * c0)) * (-2.0 * r).exp() + t * t) / ((mf + 1.0) * (mf + 1.0))
}

/// `mu_opt = (M e^{-2r} + 2 n_bar + 1) / (M + 1)`, the `C_0 = 1` minimum.
pub fn pair_mu_optimal(m: usize, r: f64, n_bar: f64) -> f64 {
    let mf = m as f64;
    (mf * (-2.0 * r).exp() + 2.0 * n_bar + 1.0) / (mf + 1.0)
}
