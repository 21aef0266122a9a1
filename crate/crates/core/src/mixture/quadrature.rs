use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Gauss-Hermite rule for the weight `exp(-t^2)` via Golub-Welsch. Nodes are
/// ascending and exactly antisymmetric; weights sum to `sqrt(pi)`.
pub fn gauss_hermite(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let jacobi = DMatrix::from_fn(k, k, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], std::f64::consts::PI.sqrt() * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // enforce the reflection symmetry of the exact rule
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k {
        let j = k - 1 - i;
        nodes[i] = 0.5 * (pairs[i].0 - pairs[j].0);
        weights[i] = 0.5 * (pairs[i].1 + pairs[j].1);
    }
    Ok((nodes, weights))
}

/// Gauss-Legendre rule on `[-1, 1]` via Golub-Welsch; weights sum to 2.
pub fn gauss_legendre(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let jacobi = DMatrix::from_fn(k, k, |i, j| {
        if i + 1 == j || j + 1 == i {
            let n = i.max(j) as f64;
            n / (4.0 * n * n - 1.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..k).map(|i| (eig.eigenvalues[i], 2.0 * eig.eigenvectors[(0, i)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

/// Nodes and probability weights for `N(0, variance)`.
pub fn normal_nodes(k: usize, variance: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if !(variance >= 0.0) {
        return Err(Error::InvalidParameter(format!("variance must be >= 0, got {variance}")));
    }
    let (t, w) = gauss_hermite(k)?;
    let scale = (2.0 * variance).sqrt();
    let total: f64 = w.iter().sum();
    Ok((t.iter().map(|x| x * scale).collect(), w.iter().map(|x| x / total).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule() {
        let (t, w) = gauss_legendre(12).unwrap();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        // exact through degree 23
        let m22: f64 = t.iter().zip(&w).map(|(x, v)| x.powi(22) * v).sum();
        assert!((m22 - 2.0 / 23.0).abs() < 1e-13);
        let e: f64 = t.iter().zip(&w).map(|(x, v)| x.exp() * v).sum();
        assert!((e - (1.0f64.exp() - (-1.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        let (t, w) = gauss_hermite(9).unwrap();
        let sum: f64 = w.iter().sum();
        assert!((sum - std::f64::consts::PI.sqrt()).abs() < 1e-13);
        // int t^4 e^{-t^2} = 3 sqrt(pi) / 4
        let m4: f64 = t.iter().zip(&w).map(|(x, v)| x.powi(4) * v).sum();
        assert!((m4 - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert_eq!(t[4], 0.0);
    }

    #[test]
    fn normal_characteristic_function() {
        let var = 2.0;
        let (x, w) = normal_nodes(41, var).unwrap();
        let ecos: f64 = x.iter().zip(&w).map(|(a, b)| a.cos() * b).sum();
        assert!((ecos - (-var / 2.0_f64).exp()).abs() < 1e-12);
        let second: f64 = x.iter().zip(&w).map(|(a, b)| a * a * b).sum();
        assert!((second - var).abs() < 1e-12);
    }
}
