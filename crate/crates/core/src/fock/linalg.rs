use nalgebra::{Complex, DMatrix, SymmetricEigen};

type CMat = DMatrix<Complex<f64>>;

/// Basis indices of the even and odd total-photon-number sectors.
pub(crate) fn parity_sectors(n_max: usize, modes: usize) -> Vec<Vec<usize>> {
    let c = n_max + 1;
    let dim = c.pow(modes as u32);
    let total = |i: usize| if modes == 2 { i / c + i % c } else { i };
    let even = (0..dim).filter(|&i| total(i) % 2 == 0).collect();
    let odd = (0..dim).filter(|&i| total(i) % 2 == 1).collect();
    vec![even, odd]
}

pub(crate) fn sub_block(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

/// Splits `m` into diagonal blocks over the given sectors when the
/// off-block entries vanish; otherwise returns `m` whole.
pub(crate) fn blocks(m: &CMat, sectors: &[Vec<usize>]) -> Vec<CMat> {
    let mut owner = vec![0usize; m.nrows()];
    for (s, idx) in sectors.iter().enumerate() {
        for &i in idx {
            owner[i] = s;
        }
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    let mut off = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if owner[i] != owner[j] {
                off = off.max(m[(i, j)].norm());
            }
        }
    }
    if off <= 1e-13 * scale {
        sectors.iter().filter(|idx| !idx.is_empty()).map(|idx| sub_block(m, idx)).collect()
    } else {
        vec![m.clone()]
    }
}

/// Real and imaginary parts of a complex matrix.
pub(crate) fn split(m: &CMat) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

pub(crate) fn join(re: &DMatrix<f64>, im: &DMatrix<f64>) -> CMat {
    re.zip_map(im, Complex::new)
}

/// Complex product assembled from real products, which run on the blocked
/// real kernel.
pub(crate) fn cmul(a: &CMat, b: &CMat) -> CMat {
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let mut re = &ar * &br;
    re.gemm(-1.0, &ai, &bi, 1.0);
    let mut im = &ar * &bi;
    im.gemm(1.0, &ai, &br, 1.0);
    join(&re, &im)
}

fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex::new(0.5, 0.0)
}

pub(crate) fn eigenvalues(m: &CMat) -> Vec<f64> {
    hermitize(m).symmetric_eigenvalues().iter().copied().collect()
}

/// Square root through the Hermitian eigendecomposition, clamping negative
/// eigenvalues at zero.
pub(crate) fn psd_sqrt(m: &CMat) -> CMat {
    let eig = SymmetricEigen::new(hermitize(m));
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let s = Complex::new(lam.max(0.0).sqrt(), 0.0);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= s;
        }
    }
    &scaled * v.adjoint()
}

/// `Tr sqrt(sqrt(a) b sqrt(a))` for Hermitian PSD `a`, `b` of equal size.
pub(crate) fn root_fidelity(a: &CMat, b: &CMat) -> f64 {
    let ra = psd_sqrt(a);
    let inner = &ra * b * &ra;
    eigenvalues(&inner).iter().map(|l| l.max(0.0).sqrt()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_product_matches_complex_product() {
        let a = CMat::from_fn(7, 5, |i, j| Complex::new(i as f64 - 0.3 * j as f64, (i * j) as f64 * 0.1));
        let b = CMat::from_fn(5, 4, |i, j| Complex::new(0.2 * j as f64, 1.0 - i as f64));
        assert!((cmul(&a, &b) - &a * &b).norm() < 1e-12);
    }

    #[test]
    fn sqrt_squares_back() {
        let m = CMat::from_row_slice(2, 2, &[
            Complex::new(2.0, 0.0),
            Complex::new(0.5, 0.3),
            Complex::new(0.5, -0.3),
            Complex::new(1.0, 0.0),
        ]);
        let r = psd_sqrt(&m);
        assert!((&r * &r - &m).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn sectors_cover_basis() {
        let s = parity_sectors(3, 2);
        assert_eq!(s[0].len() + s[1].len(), 16);
        assert_eq!(s[0].len(), 8);
    }
}
