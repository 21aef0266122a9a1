use nalgebra::{DMatrix, DVector};

use super::state::GaussianState;
use crate::error::{Error, Result};

/// Block-diagonal symplectic form with `[[0, 1], [-1, 0]]` blocks.
pub fn symplectic_form(modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Heisenberg-picture affine map `r -> matrix * r + offset`.
///
/// On states this acts as `mean -> matrix * mean + offset` and
/// `cov -> matrix * cov * matrix^T`. The matrix need not be square or
/// symplectic (feedback-reduced maps are neither).
#[derive(Debug, Clone, PartialEq)]
pub struct AffineQuadratureMap {
    matrix: DMatrix<f64>,
    offset: DVector<f64>,
}

impl AffineQuadratureMap {
    pub fn new(matrix: DMatrix<f64>, offset: DVector<f64>) -> Result<Self> {
        if offset.len() != matrix.nrows() {
            return Err(Error::Dimension(format!(
                "offset length {} for {} output quadratures",
                offset.len(),
                matrix.nrows()
            )));
        }
        if matrix.nrows() % 2 != 0 || matrix.ncols() % 2 != 0 {
            return Err(Error::Dimension("maps must act on whole modes".into()));
        }
        Ok(Self { matrix, offset })
    }

    pub fn linear(matrix: DMatrix<f64>) -> Result<Self> {
        let n = matrix.nrows();
        Self::new(matrix, DVector::zeros(n))
    }

    pub fn identity(modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(2 * modes, 2 * modes),
            offset: DVector::zeros(2 * modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn offset(&self) -> &DVector<f64> {
        &self.offset
    }

    pub fn input_modes(&self) -> usize {
        self.matrix.ncols() / 2
    }

    pub fn output_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// `other` after `self`.
    pub fn then(&self, other: &AffineQuadratureMap) -> Result<AffineQuadratureMap> {
        if other.matrix.ncols() != self.matrix.nrows() {
            return Err(Error::Dimension("cannot compose maps of mismatched size".into()));
        }
        Ok(AffineQuadratureMap {
            matrix: &other.matrix * &self.matrix,
            offset: &other.matrix * &self.offset + &other.offset,
        })
    }

    /// Lifts a square map on `modes.len()` modes to act on those modes of a
    /// `total`-mode system, leaving the rest untouched.
    pub fn embed(&self, modes: &[usize], total: usize) -> Result<AffineQuadratureMap> {
        if self.matrix.nrows() != self.matrix.ncols() || self.input_modes() != modes.len() {
            return Err(Error::Dimension(format!(
                "cannot embed a {}-mode map on {} modes",
                self.input_modes(),
                modes.len()
            )));
        }
        for (i, &m) in modes.iter().enumerate() {
            if m >= total || modes[..i].contains(&m) {
                return Err(Error::Dimension(format!("invalid target mode {m} of {total}")));
            }
        }
        let idx: Vec<usize> = modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect();
        let mut matrix = DMatrix::identity(2 * total, 2 * total);
        let mut offset = DVector::zeros(2 * total);
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                matrix[(ia, ib)] = self.matrix[(a, b)];
            }
            offset[ia] = self.offset[a];
        }
        Ok(AffineQuadratureMap { matrix, offset })
    }

    /// Schrodinger-picture action on a state.
    pub fn apply(&self, state: &GaussianState) -> Result<GaussianState> {
        if self.matrix.ncols() != state.cov().nrows() {
            return Err(Error::Dimension(format!(
                "map on {} modes applied to {}-mode state",
                self.input_modes(),
                state.modes()
            )));
        }
        let mean = &self.matrix * state.mean() + &self.offset;
        let cov = &self.matrix * state.cov() * self.matrix.transpose();
        Ok(GaussianState::from_parts_unchecked(mean, cov))
    }
}

/// QND interaction `H = kappa x_L p_A` on `(atom, light)`:
/// `x_A += kappa x_L`, `p_L -= kappa p_A`.
pub fn qnd_x_coupling(kappa: f64) -> AffineQuadratureMap {
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        1.0, 0.0,    kappa, 0.0,
        0.0, 1.0,    0.0,   0.0,
        0.0, 0.0,    1.0,   0.0,
        0.0, -kappa, 0.0,   1.0,
    ]);
    AffineQuadratureMap { matrix: m, offset: DVector::zeros(4) }
}

/// QND interaction `H = -kappa p_L x_A` on `(atom, light)`:
/// `p_A += kappa p_L`, `x_L -= kappa x_A`.
pub fn qnd_p_coupling(kappa: f64) -> AffineQuadratureMap {
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        1.0,    0.0, 0.0, 0.0,
        0.0,    1.0, 0.0, kappa,
        -kappa, 0.0, 1.0, 0.0,
        0.0,    0.0, 0.0, 1.0,
    ]);
    AffineQuadratureMap { matrix: m, offset: DVector::zeros(4) }
}

/// Phase shift `exp(-i phi n)` on one mode of a `modes`-mode system:
/// `x -> x cos(phi) + p sin(phi)`, `p -> p cos(phi) - x sin(phi)`.
pub fn phase_rotation(modes: usize, mode: usize, phi: f64) -> Result<AffineQuadratureMap> {
    if mode >= modes {
        return Err(Error::Dimension(format!("mode {mode} out of range for {modes} modes")));
    }
    let (s, c) = phi.sin_cos();
    let rot = AffineQuadratureMap {
        matrix: DMatrix::from_row_slice(2, 2, &[c, s, -s, c]),
        offset: DVector::zeros(2),
    };
    rot.embed(&[mode], modes)
}
