use nalgebra::{DMatrix, DVector};

use super::{metrics::symplectic_eigenvalues, SYMMETRY_TOL, UNCERTAINTY_TOL};
use crate::error::{Error, Result};

/// Which quadrature of a mode is addressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    /// Offset of this quadrature inside a mode's `(x, p)` pair.
    pub fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }

    pub fn conjugate(self) -> Quadrature {
        match self {
            Quadrature::X => Quadrature::P,
            Quadrature::P => Quadrature::X,
        }
    }
}

/// Index of quadrature `q` of `mode` in the `xpxp` ordering.
pub(crate) fn quad_index(mode: usize, q: Quadrature) -> usize {
    2 * mode + q.offset()
}

/// An `M`-mode Gaussian state: displacement vector and covariance matrix.
///
/// The covariance is `gamma_jk = <{dr_j, dr_k}>`; the vacuum is the identity
/// and a single quadrature has physical variance `gamma_qq / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    /// Builds a state after checking shape, symmetry and the uncertainty
    /// relation `gamma + i Omega >= 0`.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let state = Self::from_parts(mean, cov)?;
        let nu = symplectic_eigenvalues(&state.cov)?;
        if nu[0] < 1.0 - UNCERTAINTY_TOL {
            return Err(Error::Unphysical(nu[0]));
        }
        Ok(state)
    }

    /// Builds a state checking only shape and symmetry. The covariance is
    /// symmetrised. Used for intermediate objects produced by exact maps.
    pub(crate) fn from_parts(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let n = cov.nrows();
        if n == 0 || n % 2 != 0 || cov.ncols() != n || mean.len() != n {
            return Err(Error::Dimension(format!(
                "mean length {} / covariance {}x{} do not describe whole modes",
                mean.len(),
                cov.nrows(),
                cov.ncols()
            )));
        }
        let asym = max_asymmetry(&cov);
        let scale = cov.amax().max(1.0);
        if asym > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(Self { mean, cov })
    }

    pub(crate) fn from_parts_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        let cov = (&cov + cov.transpose()) * 0.5;
        Self { mean, cov }
    }

    /// `M`-mode vacuum.
    pub fn vacuum(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidParameter("vacuum needs at least one mode".into()));
        }
        Ok(Self {
            mean: DVector::zeros(2 * modes),
            cov: DMatrix::identity(2 * modes, 2 * modes),
        })
    }

    /// Single-mode thermal state with mean occupation `n_bar`.
    pub fn thermal(n_bar: f64) -> Result<Self> {
        if !(n_bar >= 0.0) || !n_bar.is_finite() {
            return Err(Error::InvalidParameter(format!("mean thermal number must be >= 0, got {n_bar}")));
        }
        Ok(Self {
            mean: DVector::zeros(2),
            cov: DMatrix::identity(2, 2) * (2.0 * n_bar + 1.0),
        })
    }

    /// Single-mode squeezed vacuum with `x` variance scaled by `exp(-2r)`.
    pub fn squeezed(r: f64) -> Self {
        Self {
            mean: DVector::zeros(2),
            cov: DMatrix::from_diagonal(&DVector::from_vec(vec![(-2.0 * r).exp(), (2.0 * r).exp()])),
        }
    }

    /// Two-mode squeezed vacuum with squeezing constant `r`.
    pub fn two_mode_squeezed(r: f64) -> Self {
        let c = (2.0 * r).cosh();
        let s = (2.0 * r).sinh();
        #[rustfmt::skip]
        let cov = DMatrix::from_row_slice(4, 4, &[
            c,   0.0, s,   0.0,
            0.0, c,   0.0, -s,
            s,   0.0, c,   0.0,
            0.0, -s,  0.0, c,
        ]);
        Self { mean: DVector::zeros(4), cov }
    }

    pub fn modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn into_parts(self) -> (DVector<f64>, DMatrix<f64>) {
        (self.mean, self.cov)
    }

    /// Returns a copy with the displacement replaced.
    pub fn with_mean(&self, mean: DVector<f64>) -> Result<Self> {
        if mean.len() != self.mean.len() {
            return Err(Error::Dimension(format!("mean length {} for {} modes", mean.len(), self.modes())));
        }
        Ok(Self { mean, cov: self.cov.clone() })
    }

    /// Tensor product `self (x) other`, modes of `self` first.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let n1 = self.cov.nrows();
        let n2 = other.cov.nrows();
        let mut cov = DMatrix::zeros(n1 + n2, n1 + n2);
        cov.view_mut((0, 0), (n1, n1)).copy_from(&self.cov);
        cov.view_mut((n1, n1), (n2, n2)).copy_from(&other.cov);
        let mut mean = DVector::zeros(n1 + n2);
        mean.rows_mut(0, n1).copy_from(&self.mean);
        mean.rows_mut(n1, n2).copy_from(&other.mean);
        GaussianState { mean, cov }
    }

    /// Reduced state on `kept` modes, in the order given.
    pub fn partial_trace(&self, kept: &[usize]) -> Result<GaussianState> {
        let m = self.modes();
        if kept.is_empty() {
            return Err(Error::Dimension("partial trace must keep at least one mode".into()));
        }
        for (i, &k) in kept.iter().enumerate() {
            if k >= m {
                return Err(Error::Dimension(format!("mode {k} out of range for {m}-mode state")));
            }
            if kept[..i].contains(&k) {
                return Err(Error::Dimension(format!("mode {k} listed twice")));
            }
        }
        let idx: Vec<usize> = kept.iter().flat_map(|&k| [2 * k, 2 * k + 1]).collect();
        Ok(self.select(&idx))
    }

    /// Removes one mode, keeping the others in order.
    pub fn trace_out(&self, mode: usize) -> Result<GaussianState> {
        let kept: Vec<usize> = (0..self.modes()).filter(|&k| k != mode).collect();
        if kept.len() == self.modes() {
            return Err(Error::Dimension(format!("mode {mode} out of range for {}-mode state", self.modes())));
        }
        self.partial_trace(&kept)
    }

    pub(crate) fn select(&self, idx: &[usize]) -> GaussianState {
        let n = idx.len();
        let cov = DMatrix::from_fn(n, n, |i, j| self.cov[(idx[i], idx[j])]);
        let mean = DVector::from_fn(n, |i, _| self.mean[idx[i]]);
        GaussianState { mean, cov }
    }

    pub fn is_zero_mean(&self, tol: f64) -> bool {
        self.mean.amax() <= tol
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}
