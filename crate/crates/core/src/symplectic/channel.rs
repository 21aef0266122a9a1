use nalgebra::{Complex, DMatrix};

use super::{maps::symplectic_form, state::GaussianState, UNCERTAINTY_TOL};
use crate::error::{Error, Result};

/// Gaussian channel `cov -> A cov A^T + N`, `mean -> A mean`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    a: DMatrix<f64>,
    n: DMatrix<f64>,
}

impl GaussianChannel {
    /// Checks shapes, symmetry of `N` and complete positivity
    /// `N + i(Omega - A Omega A^T) >= 0`.
    pub fn new(a: DMatrix<f64>, n: DMatrix<f64>) -> Result<Self> {
        let dim = a.nrows();
        if dim == 0 || dim % 2 != 0 || a.ncols() != dim || n.nrows() != dim || n.ncols() != dim {
            return Err(Error::Dimension("channel matrices must be 2M x 2M".into()));
        }
        let asym = (&n - n.transpose()).amax();
        if asym > 1e-10 {
            return Err(Error::NotSymmetric(asym));
        }
        let omega = symplectic_form(dim / 2);
        let defect = &omega - &a * &omega * a.transpose();
        let herm = DMatrix::from_fn(dim, dim, |i, j| Complex::new(n[(i, j)], defect[(i, j)]));
        let lowest = herm.symmetric_eigenvalues().min();
        if lowest < -UNCERTAINTY_TOL {
            return Err(Error::InvalidParameter(format!(
                "channel is not completely positive (eigenvalue {lowest:e})"
            )));
        }
        Ok(Self { a, n })
    }

    /// Loss `1 - eta` with thermal refilling towards `2 eta gamma_vac` on
    /// every one of `modes` modes.
    pub fn loss_thermal(modes: usize, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!("depumping factor must lie in [0, 1], got {eta}")));
        }
        let dim = 2 * modes;
        Ok(Self {
            a: DMatrix::identity(dim, dim) * (1.0 - eta).sqrt(),
            n: DMatrix::identity(dim, dim) * (2.0 * eta),
        })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn noise(&self) -> &DMatrix<f64> {
        &self.n
    }

    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if state.cov().nrows() != self.a.nrows() {
            return Err(Error::Dimension(format!(
                "{}-mode channel on {}-mode state",
                self.a.nrows() / 2,
                state.modes()
            )));
        }
        let mean = &self.a * state.mean();
        let cov = &self.a * state.cov() * self.a.transpose() + &self.n;
        Ok(GaussianState::from_parts_unchecked(mean, cov))
    }
}

/// Depumping step on every mode of an atomic state:
/// `cov -> (1 - eta) cov + 2 eta I`, `mean -> sqrt(1 - eta) mean`.
pub fn loss_thermal_step(state: &GaussianState, eta: f64) -> Result<GaussianState> {
    GaussianChannel::loss_thermal(state.modes(), eta)?.apply(state)
}
