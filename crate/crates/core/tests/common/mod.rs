#![allow(dead_code)]

use gaussify::symplectic::{is_symplectic, symplectic_form, GaussianState};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// `exp(J H)` for a random symmetric `H` with entries in `[-scale, scale]`.
pub fn random_symplectic<R: Rng>(rng: &mut R, modes: usize, scale: f64) -> DMatrix<f64> {
    let n = 2 * modes;
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-scale..scale));
    let h = (&a + a.transpose()) * 0.5;
    let s = (symplectic_form(modes) * h).exp();
    assert!(is_symplectic(&s, 1e-9));
    s
}

/// Zero-mean state `S diag(nu) S^T` with symplectic eigenvalues in `[1, max_nu]`.
pub fn random_state<R: Rng>(rng: &mut R, modes: usize, max_nu: f64, scale: f64) -> GaussianState {
    let s = random_symplectic(rng, modes, scale);
    let mut d = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        let nu = rng.random_range(1.0..max_nu);
        d[(2 * k, 2 * k)] = nu;
        d[(2 * k + 1, 2 * k + 1)] = nu;
    }
    let cov = &s * d * s.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianState::new(DVector::zeros(2 * modes), cov).expect("valid state")
}
