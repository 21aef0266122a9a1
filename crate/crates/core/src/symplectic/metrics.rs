use nalgebra::{DMatrix, SymmetricEigen};

use super::{maps::symplectic_form, state::GaussianState, SYMMETRY_TOL};
use crate::error::{Error, Result};

/// Symplectic spectrum of a covariance matrix, ascending, one value per mode.
///
/// Computed as the moduli of the eigenvalues of `i Omega gamma` through the
/// similar Hermitian matrix `i gamma^{1/2} Omega gamma^{1/2}`, whose square is
/// the real symmetric `-(gamma^{1/2} Omega gamma^{1/2})^2`.
pub fn symplectic_eigenvalues(cov: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = cov.nrows();
    if n == 0 || n % 2 != 0 || cov.ncols() != n {
        return Err(Error::Dimension(format!("{}x{} is not a covariance matrix", n, cov.ncols())));
    }
    let asym = (cov - cov.transpose()).amax();
    if asym > SYMMETRY_TOL * cov.amax().max(1.0) {
        return Err(Error::NotSymmetric(asym));
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let scale = eig.eigenvalues.amax().max(1.0);
    if eig.eigenvalues.min() < -SYMMETRY_TOL * scale {
        return Err(Error::NotPositiveDefinite);
    }
    let sqrt_vals = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let h = &root * symplectic_form(n / 2) * &root;
    let minus_h2 = -(&h * &h);
    let sq = SymmetricEigen::new((&minus_h2 + minus_h2.transpose()) * 0.5).eigenvalues;
    let mut nu: Vec<f64> = sq.iter().map(|v| v.max(0.0).sqrt()).collect();
    nu.sort_by(f64::total_cmp);
    // each symplectic eigenvalue appears twice
    Ok(nu.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect())
}

/// Checks `S Omega S^T = Omega` elementwise to `tol`.
pub fn is_symplectic(s: &DMatrix<f64>, tol: f64) -> bool {
    if s.nrows() != s.ncols() || s.nrows() % 2 != 0 {
        return false;
    }
    let omega = symplectic_form(s.nrows() / 2);
    (s * &omega * s.transpose() - omega).amax() <= tol
}

/// Covariance of the partial transpose with respect to `mode` (sign flip of
/// that mode's `p`).
pub fn partial_transpose(cov: &DMatrix<f64>, mode: usize) -> Result<DMatrix<f64>> {
    let n = cov.nrows();
    if 2 * mode + 1 >= n {
        return Err(Error::Dimension(format!("mode {mode} out of range")));
    }
    let mut out = cov.clone();
    let p = 2 * mode + 1;
    for k in 0..n {
        if k != p {
            out[(p, k)] = -out[(p, k)];
            out[(k, p)] = -out[(k, p)];
        }
    }
    Ok(out)
}

/// Logarithmic negativity `max(0, -log2 mu)` of a two-mode state, where `mu`
/// is the lower symplectic eigenvalue of the partially transposed covariance.
pub fn log_negativity(state: &GaussianState) -> Result<f64> {
    if state.modes() != 2 {
        return Err(Error::Dimension(format!(
            "log negativity needs a two-mode state, got {} modes",
            state.modes()
        )));
    }
    let mu = symplectic_eigenvalues(&partial_transpose(state.cov(), 1)?)?[0];
    Ok((-mu.log2()).max(0.0))
}

/// `Tr rho^2 = 1 / sqrt(det gamma)`.
pub fn purity_gaussian(state: &GaussianState) -> Result<f64> {
    let det = state.cov().determinant();
    if !(det > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    Ok(1.0 / det.sqrt())
}

/// `Tr(rho1 rho2) = exp(-d^T (g1+g2)^{-1} d) / sqrt(det((g1+g2)/2))` with
/// `d` the difference of displacements.
pub fn gaussian_overlap(s1: &GaussianState, s2: &GaussianState) -> Result<f64> {
    if s1.modes() != s2.modes() {
        return Err(Error::Dimension(format!("overlap of {} and {} modes", s1.modes(), s2.modes())));
    }
    let sum = s1.cov() + s2.cov();
    let chol = sum.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let d = s1.mean() - s2.mean();
    let quad = d.dot(&chol.solve(&d));
    let half_det = (sum * 0.5).determinant();
    Ok((-quad).exp() / half_det.sqrt())
}
