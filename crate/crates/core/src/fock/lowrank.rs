use nalgebra::{Complex, DMatrix, SymmetricEigen};

use super::density::FockDensityMatrix;
use super::linalg::{blocks, cmul, join, parity_sectors, split};
use crate::error::{Error, Result};

type C64 = Complex<f64>;

/// Eigenvalues below this fraction of the largest are dropped.
const RANK_TOL: f64 = 1e-15;

/// Two-mode density matrix `rho = sum_s V_s V_s^dag` kept as weighted
/// eigenvectors per photon-number parity sector.
#[derive(Debug, Clone)]
pub struct LowRankDensity {
    n_max: usize,
    sectors: Vec<Vec<usize>>,
    vectors: Vec<DMatrix<C64>>,
}

impl LowRankDensity {
    pub fn vacuum(n_max: usize) -> Self {
        let sectors = parity_sectors(n_max, 2);
        let mut even = DMatrix::zeros(sectors[0].len(), 1);
        even[(0, 0)] = C64::new(1.0, 0.0);
        let odd = DMatrix::zeros(sectors[1].len(), 0);
        Self { n_max, sectors, vectors: vec![even, odd] }
    }

    /// Decomposes a parity-block-diagonal density matrix.
    pub fn from_density(rho: &FockDensityMatrix) -> Result<Self> {
        if rho.modes() != 2 {
            return Err(Error::Dimension("low-rank form is implemented for two modes".into()));
        }
        let sectors = parity_sectors(rho.n_max(), 2);
        let parts = blocks(rho.data(), &sectors);
        if parts.len() != sectors.len() {
            return Err(Error::InvalidParameter("state mixes photon-number parities".into()));
        }
        Ok(Self::from_blocks(rho.n_max(), sectors, parts))
    }

    fn from_blocks(n_max: usize, sectors: Vec<Vec<usize>>, parts: Vec<DMatrix<C64>>) -> Self {
        let eigs: Vec<_> = parts.into_iter().map(|b| SymmetricEigen::new((&b + b.adjoint()) * C64::new(0.5, 0.0))).collect();
        let top = eigs.iter().flat_map(|e| e.eigenvalues.iter().copied()).fold(0.0, f64::max);
        let vectors = eigs
            .iter()
            .map(|e| {
                let keep: Vec<usize> = (0..e.eigenvalues.len()).filter(|&i| e.eigenvalues[i] > RANK_TOL * top).collect();
                let mut v = DMatrix::zeros(e.eigenvectors.nrows(), keep.len());
                for (c, &i) in keep.iter().enumerate() {
                    v.set_column(c, &(e.eigenvectors.column(i) * C64::new(e.eigenvalues[i].sqrt(), 0.0)));
                }
                v
            })
            .collect();
        Self { n_max, sectors, vectors }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn rank(&self) -> usize {
        self.vectors.iter().map(|v| v.ncols()).sum()
    }

    pub fn sectors(&self) -> &[Vec<usize>] {
        &self.sectors
    }

    pub fn trace(&self) -> f64 {
        self.vectors.iter().map(|v| v.norm_squared()).sum()
    }

    pub fn purity(&self) -> f64 {
        let t = self.trace();
        self.vectors
            .iter()
            .map(|v| {
                let g = v.adjoint() * v;
                g.iter().map(|z| z.norm_sqr()).sum::<f64>()
            })
            .sum::<f64>()
            / (t * t)
    }

    /// `sum_k w_k K_k rho K_k^dag`, with `ops[k][s]` the block of `K_k` on
    /// parity sector `s`. The result is renormalised; the returned scalar is
    /// the unnormalised trace.
    pub fn kraus_update<I>(&self, ops: I) -> Result<(Self, f64)>
    where
        I: IntoIterator<Item = Result<(f64, Vec<DMatrix<C64>>)>>,
    {
        let mut acc: Vec<(DMatrix<f64>, DMatrix<f64>)> =
            self.sectors.iter().map(|s| (DMatrix::zeros(s.len(), s.len()), DMatrix::zeros(s.len(), s.len()))).collect();
        for op in ops {
            let (w, blocks) = op?;
            if blocks.len() != self.sectors.len() {
                return Err(Error::Dimension("Kraus operator does not match the sector layout".into()));
            }
            for ((re, im), (k, v)) in acc.iter_mut().zip(blocks.iter().zip(&self.vectors)) {
                if v.ncols() == 0 {
                    continue;
                }
                // (X + iY)(X + iY)^dag = X X^T + Y Y^T + i (Y X^T - X Y^T)
                let (x, y) = split(&cmul(k, v));
                re.gemm(w, &x, &x.transpose(), 1.0);
                re.gemm(w, &y, &y.transpose(), 1.0);
                im.gemm(w, &y, &x.transpose(), 1.0);
                im.gemm(-w, &x, &y.transpose(), 1.0);
            }
        }
        let mut acc: Vec<DMatrix<C64>> = acc.iter().map(|(re, im)| join(re, im)).collect();
        let total: f64 = acc.iter().map(|b| (0..b.nrows()).map(|i| b[(i, i)].re).sum::<f64>()).sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::Numerical("Kraus update produced a vanishing state".into()));
        }
        for b in acc.iter_mut() {
            *b /= C64::new(total, 0.0);
        }
        Ok((Self::from_blocks(self.n_max, self.sectors.clone(), acc), total))
    }

    pub fn to_density(&self) -> FockDensityMatrix {
        let dim = (self.n_max + 1) * (self.n_max + 1);
        let mut data = DMatrix::zeros(dim, dim);
        for (idx, v) in self.sectors.iter().zip(&self.vectors) {
            let block = v * v.adjoint();
            for (a, &i) in idx.iter().enumerate() {
                for (b, &j) in idx.iter().enumerate() {
                    data[(i, j)] = block[(a, b)];
                }
            }
        }
        FockDensityMatrix::from_raw(self.n_max, 2, data)
    }

    /// `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` through the factor `V`.
    pub fn fidelity_with(&self, sigma: &FockDensityMatrix) -> Result<f64> {
        if sigma.n_max() != self.n_max || sigma.modes() != 2 {
            return Err(Error::Dimension("fidelity needs a common two-mode space".into()));
        }
        let mut root = 0.0;
        for (idx, v) in self.sectors.iter().zip(&self.vectors) {
            if v.ncols() == 0 {
                continue;
            }
            let s = DMatrix::from_fn(idx.len(), idx.len(), |a, b| sigma.data()[(idx[a], idx[b])]);
            let gram = v.adjoint() * s * v;
            let herm = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
            root += herm.symmetric_eigenvalues().iter().map(|l| l.max(0.0).sqrt()).sum::<f64>();
        }
        Ok((root * root / self.trace()).min(1.0))
    }

    /// Probability on the outermost shell `max(n_A, n_B) = n_max`, a proxy
    /// for the mass lost to truncation.
    pub fn edge_mass(&self) -> f64 {
        let c = self.n_max + 1;
        let mut mass = 0.0;
        for (idx, v) in self.sectors.iter().zip(&self.vectors) {
            for (a, &i) in idx.iter().enumerate() {
                if i / c == self.n_max || i % c == self.n_max {
                    mass += v.row(a).norm_squared();
                }
            }
        }
        mass / self.trace()
    }
}
