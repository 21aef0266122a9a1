use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symplectic::{gaussian_overlap, GaussianState};

/// Weighted list of Gaussian states of equal mode count. The weights are
/// not forced to sum to one, so a run can carry its success probability.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    components: Vec<(f64, GaussianState)>,
}

impl GaussianMixture {
    pub fn new(components: Vec<(f64, GaussianState)>) -> Result<Self> {
        let first = components.first().ok_or_else(|| Error::InvalidParameter("mixture has no components".into()))?;
        let modes = first.1.modes();
        for (w, s) in &components {
            if !(*w >= 0.0) || !w.is_finite() {
                return Err(Error::InvalidParameter(format!("mixture weight {w} is not a nonnegative number")));
            }
            if s.modes() != modes {
                return Err(Error::Dimension("mixture components have different mode counts".into()));
            }
        }
        if components.iter().all(|(w, _)| *w == 0.0) {
            return Err(Error::InvalidParameter("mixture has zero total weight".into()));
        }
        Ok(Self { components })
    }

    pub fn single(state: GaussianState) -> Self {
        Self { components: vec![(1.0, state)] }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.components[0].1.modes()
    }

    pub fn norm(&self) -> f64 {
        self.components.iter().map(|(w, _)| w).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &GaussianState)> {
        self.components.iter().map(|(w, s)| (*w, s))
    }

    pub fn components(&self) -> &[(f64, GaussianState)] {
        &self.components
    }

    pub fn into_components(self) -> Vec<(f64, GaussianState)> {
        self.components
    }

    /// Rescales weights to sum to one.
    pub fn normalized(&self) -> GaussianMixture {
        let n = self.norm();
        Self { components: self.components.iter().map(|(w, s)| (w / n, s.clone())).collect() }
    }

    /// Drops components below `rel_tol` of the largest weight and
    /// renormalises.
    pub fn pruned(&self, rel_tol: f64) -> GaussianMixture {
        let top = self.components.iter().map(|(w, _)| *w).fold(0.0, f64::max);
        let kept: Vec<_> = self.components.iter().filter(|(w, _)| *w >= rel_tol * top).cloned().collect();
        Self { components: kept }.normalized()
    }

    /// Applies `f` to every component state, keeping weights.
    pub fn map_states<F>(&self, f: F) -> Result<GaussianMixture>
    where
        F: Fn(&GaussianState) -> Result<GaussianState>,
    {
        let components = self.components.iter().map(|(w, s)| Ok((*w, f(s)?))).collect::<Result<Vec<_>>>()?;
        Ok(Self { components })
    }

    /// Exact mixture moments: `mean = sum w m_i`,
    /// `cov = sum w (gamma_i + 2 (m_i - mean)(m_i - mean)^T)`.
    pub fn mean_cov(&self) -> Result<(DVector<f64>, DMatrix<f64>)> {
        let norm = self.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter("mixture has zero total weight".into()));
        }
        let dim = 2 * self.modes();
        let mut mean = DVector::zeros(dim);
        for (w, s) in &self.components {
            mean += s.mean() * (*w / norm);
        }
        let mut cov = DMatrix::zeros(dim, dim);
        for (w, s) in &self.components {
            let d = s.mean() - &mean;
            cov += (s.cov() + (&d * d.transpose()) * 2.0) * (*w / norm);
        }
        Ok((mean, (&cov + cov.transpose()) * 0.5))
    }

    /// `Tr rho^2 = sum_ij w_i w_j Tr(rho_i rho_j)` for the normalised mixture.
    pub fn purity(&self) -> Result<f64> {
        let norm = self.norm();
        let mut total = 0.0;
        for (i, (wi, si)) in self.components.iter().enumerate() {
            total += wi * wi * gaussian_overlap(si, si)?;
            for (wj, sj) in &self.components[i + 1..] {
                total += 2.0 * wi * wj * gaussian_overlap(si, sj)?;
            }
        }
        Ok(total / (norm * norm))
    }
}

/// Total variance `I = (<(dx_A - dx_B)^2> + <(dp_A + dp_B)^2>) / 2` of a
/// two-mode covariance matrix; `I < 1` certifies entanglement.
pub fn total_variance(cov: &DMatrix<f64>) -> Result<f64> {
    if cov.nrows() != 4 || cov.ncols() != 4 {
        return Err(Error::Dimension("total variance needs a two-mode covariance".into()));
    }
    let x = cov[(0, 0)] + cov[(2, 2)] - 2.0 * cov[(0, 2)];
    let p = cov[(1, 1)] + cov[(3, 3)] + 2.0 * cov[(1, 3)];
    Ok(0.25 * (x + p))
}

/// [`total_variance`] of a mixture's moments.
pub fn total_variance_of(mixture: &GaussianMixture) -> Result<f64> {
    total_variance(&mixture.mean_cov()?.1)
}
