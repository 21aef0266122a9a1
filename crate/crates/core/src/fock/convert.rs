use nalgebra::{Complex, DMatrix, DVector};

use super::density::{FockDensityMatrix, TruncationReport};
use super::metrics::CONVERGED_TRACE_DEFICIT;
use crate::error::{Error, Result};
use crate::mixture::GaussianMixture;
use crate::symplectic::{purity_gaussian, GaussianState};

type C64 = Complex<f64>;

/// Conversions fail when the truncation discards more probability than this.
pub const DEFAULT_MAX_TRACE_DEFICIT: f64 = 1e-6;

/// Bargmann matrix `A` and vacuum amplitude `rho_00` of a zero-mean state.
///
/// With `z = (alpha*, beta)`, `<alpha| rho |beta> e^{(|alpha|^2+|beta|^2)/2}
/// = rho_00 exp(z^T A z / 2)`, so the Fock elements obey
/// `sqrt(k_i + 1) rho_{k + e_i} = sum_j A_ij sqrt(k_j) rho_{k - e_j}`
/// over the multi-index `k = (ket indices, bra indices)`.
fn bargmann(state: &GaussianState) -> Result<(DMatrix<C64>, f64)> {
    let m = state.modes();
    let g = state.cov();
    let x = DMatrix::from_fn(m, m, |i, j| g[(2 * i, 2 * j)]);
    let p = DMatrix::from_fn(m, m, |i, j| g[(2 * i + 1, 2 * j + 1)]);
    let xp = DMatrix::from_fn(m, m, |i, j| g[(2 * i, 2 * j + 1)]);
    // <a_i^dag a_j> and <a_i a_j>
    let adag_a = DMatrix::from_fn(m, m, |i, j| {
        let id = if i == j { 2.0 } else { 0.0 };
        C64::new(x[(i, j)] + p[(i, j)] - id, xp[(i, j)] - xp[(j, i)]) / 4.0
    });
    let a_a = DMatrix::from_fn(m, m, |i, j| C64::new(x[(i, j)] - p[(i, j)], xp[(i, j)] + xp[(j, i)]) / 4.0);
    let n = 2 * m;
    let mut q = DMatrix::<C64>::identity(n, n);
    for i in 0..m {
        for j in 0..m {
            q[(i, j)] += adag_a[(i, j)];
            q[(i, j + m)] += a_a[(i, j)].conj();
            q[(i + m, j)] += a_a[(i, j)];
            q[(i + m, j + m)] += adag_a[(i, j)].conj();
        }
    }
    let det = q.determinant();
    if !(det.re > 0.0) {
        return Err(Error::NotPositiveDefinite);
    }
    let qinv = q.try_inverse().ok_or(Error::NotPositiveDefinite)?;
    let inner = DMatrix::<C64>::identity(n, n) - qinv;
    // swap the a and a^dag halves
    let a = DMatrix::from_fn(n, n, |i, j| inner[((i + m) % n, j)]);
    Ok((a, 1.0 / det.re.sqrt()))
}

fn check_zero_mean(state: &GaussianState) -> Result<()> {
    check_modes(state, 2)
}

fn check_modes(state: &GaussianState, max_modes: usize) -> Result<()> {
    if state.modes() > max_modes {
        return Err(Error::Dimension(format!(
            "Fock conversion supports up to {max_modes} modes, got {}",
            state.modes()
        )));
    }
    if !state.is_zero_mean(1e-12) {
        return Err(Error::InvalidParameter("Fock conversion needs a zero-mean state".into()));
    }
    Ok(())
}

/// Fills `out` (row-major over `dims` equal cutoffs) with the recursion
/// driven by `a`. `out[0]` must hold the seed value.
fn recurse(a: &DMatrix<C64>, c: usize, out: &mut [C64]) {
    let d = a.nrows();
    let sqrt: Vec<f64> = (0..=c).map(|k| (k as f64).sqrt()).collect();
    let strides: Vec<usize> = (0..d).map(|i| c.pow((d - 1 - i) as u32)).collect();
    let mut k = vec![0usize; d];
    for flat in 1..out.len() {
        // increment the multi-index
        let mut pos = d - 1;
        loop {
            k[pos] += 1;
            if k[pos] < c {
                break;
            }
            k[pos] = 0;
            pos -= 1;
        }
        if k.iter().sum::<usize>() % 2 == 1 {
            out[flat] = C64::new(0.0, 0.0);
            continue;
        }
        let i = k.iter().position(|&v| v > 0).expect("nonzero multi-index");
        let base = flat - strides[i];
        k[i] -= 1;
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..d {
            if k[j] > 0 {
                acc += a[(i, j)] * sqrt[k[j]] * out[base - strides[j]];
            }
        }
        k[i] += 1;
        out[flat] = acc / sqrt[k[i]];
    }
}

/// Number-basis amplitudes of a pure zero-mean Gaussian state (global phase
/// fixed by a real positive vacuum amplitude).
pub fn gaussian_ket(state: &GaussianState, n_max: usize) -> Result<DVector<C64>> {
    check_zero_mean(state)?;
    pure_amplitudes(state, n_max)
}

/// [`gaussian_ket`] for up to four modes, row-major over the modes.
pub(crate) fn pure_amplitudes(state: &GaussianState, n_max: usize) -> Result<DVector<C64>> {
    check_modes(state, 4)?;
    if (purity_gaussian(state)? - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("state is not pure".into()));
    }
    let (a, rho00) = bargmann(state)?;
    let m = state.modes();
    let ket_block = a.view((0, 0), (m, m)).into_owned();
    let c = n_max + 1;
    let mut amps = vec![C64::new(0.0, 0.0); c.pow(m as u32)];
    amps[0] = C64::new(rho00.sqrt(), 0.0);
    recurse(&ket_block, c, &mut amps);
    Ok(DVector::from_vec(amps))
}

/// Density matrix of a zero-mean Gaussian state of one or two modes.
pub fn gaussian_to_fock(state: &GaussianState, n_max: usize) -> Result<(FockDensityMatrix, TruncationReport)> {
    gaussian_to_fock_with_tolerance(state, n_max, DEFAULT_MAX_TRACE_DEFICIT)
}

pub fn gaussian_to_fock_with_tolerance(
    state: &GaussianState,
    n_max: usize,
    max_deficit: f64,
) -> Result<(FockDensityMatrix, TruncationReport)> {
    check_zero_mean(state)?;
    if n_max == 0 {
        return Err(Error::InvalidParameter("cutoff must be at least 1".into()));
    }
    let m = state.modes();
    let c = n_max + 1;
    let dim = c.pow(m as u32);
    let data = if (purity_gaussian(state)? - 1.0).abs() <= 1e-9 {
        let ket = gaussian_ket(state, n_max)?;
        &ket * ket.adjoint()
    } else {
        let (a, rho00) = bargmann(state)?;
        let mut flat = vec![C64::new(0.0, 0.0); dim * dim];
        flat[0] = C64::new(rho00, 0.0);
        recurse(&a, c, &mut flat);
        // multi-index (ket..., bra...) is row-major (row, col)
        let mut data = DMatrix::from_row_slice(dim, dim, &flat);
        data = (&data + data.adjoint()) * C64::new(0.5, 0.0);
        data
    };
    let rho = FockDensityMatrix::from_raw(n_max, m, data);
    let report = rho.report(CONVERGED_TRACE_DEFICIT);
    if report.trace_deficit > max_deficit {
        return Err(Error::Truncation { n_max, deficit: report.trace_deficit });
    }
    Ok((rho, report))
}

/// Weighted sum of component conversions, in component order. The trace
/// deficit of the sum is the weighted sum of component deficits.
pub fn mixture_to_fock(mixture: &GaussianMixture, n_max: usize) -> Result<(FockDensityMatrix, TruncationReport)> {
    let norm = mixture.norm();
    let modes = mixture.modes();
    let pure = mixture.iter().all(|(_, s)| purity_gaussian(s).map(|p| (p - 1.0).abs() <= 1e-9).unwrap_or(false));
    if pure && modes <= 2 {
        // rho = B B^dag with one weighted ket per column
        let dim = (n_max + 1).pow(modes as u32);
        let mut b = DMatrix::<C64>::zeros(dim, mixture.len());
        let mut deficit = 0.0;
        for (col, (w, state)) in mixture.iter().enumerate() {
            let ket = gaussian_ket(state, n_max)?;
            deficit += w / norm * (1.0 - ket.norm_squared());
            b.set_column(col, &(ket * C64::new((w / norm).sqrt(), 0.0)));
        }
        if deficit > DEFAULT_MAX_TRACE_DEFICIT {
            return Err(Error::Truncation { n_max, deficit });
        }
        let data = &b * b.adjoint();
        return Ok((
            FockDensityMatrix::from_raw(n_max, modes, data),
            TruncationReport { trace_deficit: deficit, converged: deficit <= CONVERGED_TRACE_DEFICIT },
        ));
    }
    let mut acc: Option<DMatrix<C64>> = None;
    let mut deficit = 0.0;
    for (w, state) in mixture.iter() {
        let (rho, rep) = gaussian_to_fock(state, n_max)?;
        let scaled = rho.data() * C64::new(w / norm, 0.0);
        deficit += w / norm * rep.trace_deficit;
        acc = Some(match acc {
            None => scaled,
            Some(sum) => sum + scaled,
        });
    }
    let data = acc.ok_or_else(|| Error::InvalidParameter("empty mixture".into()))?;
    Ok((
        FockDensityMatrix::from_raw(n_max, modes, data),
        TruncationReport { trace_deficit: deficit, converged: deficit <= CONVERGED_TRACE_DEFICIT },
    ))
}
