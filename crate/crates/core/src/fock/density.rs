use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};

/// Density matrix of one or two modes in a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    n_max: usize,
    modes: usize,
    data: DMatrix<Complex<f64>>,
}

/// How much probability the truncation discarded.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TruncationReport {
    pub trace_deficit: f64,
    pub converged: bool,
}

impl FockDensityMatrix {
    pub fn new(n_max: usize, modes: usize, data: DMatrix<Complex<f64>>) -> Result<Self> {
        if !(1..=2).contains(&modes) || n_max == 0 {
            return Err(Error::InvalidParameter(format!("{modes} modes at cutoff {n_max}")));
        }
        let dim = (n_max + 1).pow(modes as u32);
        if data.nrows() != dim || data.ncols() != dim {
            return Err(Error::Dimension(format!("expected {dim}x{dim}, got {}x{}", data.nrows(), data.ncols())));
        }
        let herm = (&data - data.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > 1e-10 {
            return Err(Error::InvalidParameter(format!("matrix is not Hermitian (deviation {herm:e})")));
        }
        Ok(Self { n_max, modes, data })
    }

    pub(crate) fn from_raw(n_max: usize, modes: usize, data: DMatrix<Complex<f64>>) -> Self {
        Self { n_max, modes, data }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &DMatrix<Complex<f64>> {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    pub fn report(&self, converged_below: f64) -> TruncationReport {
        let trace_deficit = 1.0 - self.trace();
        TruncationReport { trace_deficit, converged: trace_deficit <= converged_below }
    }

    /// Basis index of `|n_A, n_B>`.
    pub fn index(&self, n_a: usize, n_b: usize) -> usize {
        n_a * (self.n_max + 1) + n_b
    }

    /// Element `<n_a, n_b| rho |m_a, m_b>`.
    pub fn element(&self, n_a: usize, n_b: usize, m_a: usize, m_b: usize) -> Complex<f64> {
        self.data[(self.index(n_a, n_b), self.index(m_a, m_b))]
    }

    /// Partial transpose on mode B:
    /// `<a, b| rho^{T_B} |a', b'> = <a, b'| rho |a', b>`.
    pub fn partial_transpose(&self) -> Result<FockDensityMatrix> {
        if self.modes != 2 {
            return Err(Error::Dimension("partial transpose needs two modes".into()));
        }
        let c = self.n_max + 1;
        let dim = self.dim();
        let data = DMatrix::from_fn(dim, dim, |row, col| {
            let (a, b) = (row / c, row % c);
            let (a2, b2) = (col / c, col % c);
            self.data[(a * c + b2, a2 * c + b)]
        });
        Ok(FockDensityMatrix { n_max: self.n_max, modes: 2, data })
    }

    /// Covariance matrix (`vacuum = I`) from the number-basis moments
    /// `<a_i^dag a_j>` and `<a_i a_j>`. First moments are taken as zero, which
    /// holds for every parity-symmetric state.
    pub fn covariance(&self) -> DMatrix<f64> {
        let m = self.modes;
        let c = self.n_max + 1;
        let digits = |flat: usize| -> [usize; 2] {
            if m == 1 {
                [flat, 0]
            } else {
                [flat / c, flat % c]
            }
        };
        let flat = |d: [usize; 2]| if m == 1 { d[0] } else { d[0] * c + d[1] };
        let mut ad_a = DMatrix::<Complex<f64>>::zeros(m, m);
        let mut a_a = DMatrix::<Complex<f64>>::zeros(m, m);
        for k in 0..self.dim() {
            let n = digits(k);
            for j in 0..m {
                if n[j] == 0 {
                    continue;
                }
                let mut low = n;
                low[j] -= 1;
                let s1 = (n[j] as f64).sqrt();
                for i in 0..m {
                    // <a_i^dag a_j> = sum_k rho(k, k - e_j + e_i) sqrt(n_j (n_i - d_ij + 1))
                    let mut up = low;
                    up[i] += 1;
                    if up[i] < c {
                        ad_a[(i, j)] += self.data[(k, flat(up))] * (s1 * (up[i] as f64).sqrt());
                    }
                    if low[i] > 0 {
                        let mut low2 = low;
                        low2[i] -= 1;
                        a_a[(i, j)] += self.data[(k, flat(low2))] * (s1 * (low[i] as f64).sqrt());
                    }
                }
            }
        }
        let mut cov = DMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                let id = if i == j { 1.0 } else { 0.0 };
                cov[(2 * i, 2 * j)] = 2.0 * (ad_a[(i, j)].re + a_a[(i, j)].re) + id;
                cov[(2 * i + 1, 2 * j + 1)] = 2.0 * (ad_a[(i, j)].re - a_a[(i, j)].re) + id;
                cov[(2 * i, 2 * j + 1)] = 2.0 * (a_a[(i, j)].im + ad_a[(i, j)].im);
                cov[(2 * i + 1, 2 * j)] = 2.0 * (a_a[(i, j)].im - ad_a[(i, j)].im);
            }
        }
        (&cov + cov.transpose()) * 0.5
    }

    /// `sum_i w_i rho_i` in the given order.
    pub fn weighted_sum(parts: &[(f64, FockDensityMatrix)]) -> Result<FockDensityMatrix> {
        let (_, first) = parts.first().ok_or_else(|| Error::InvalidParameter("empty sum".into()))?;
        let mut data = DMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.n_max != first.n_max || rho.modes != first.modes {
                return Err(Error::Dimension("mismatched Fock spaces".into()));
            }
            data += &rho.data * Complex::new(*w, 0.0);
        }
        Ok(FockDensityMatrix { n_max: first.n_max, modes: first.modes, data })
    }
}

/// Two-mode squeezed vacuum `sqrt(1 - l^2) sum l^n |n, n>`, `l = tanh r`,
/// truncated at `n_max` (not renormalised).
pub fn tmsv_fock(r: f64, n_max: usize) -> Result<FockDensityMatrix> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("cutoff must be at least 1".into()));
    }
    let lambda = r.tanh();
    let c = n_max + 1;
    let amp: Vec<f64> = (0..c).map(|n| (1.0 - lambda * lambda).sqrt() * lambda.powi(n as i32)).collect();
    let dim = c * c;
    let mut data = DMatrix::zeros(dim, dim);
    for n in 0..c {
        for m in 0..c {
            data[(n * c + n, m * c + m)] = Complex::new(amp[n] * amp[m], 0.0);
        }
    }
    Ok(FockDensityMatrix { n_max, modes: 2, data })
}
