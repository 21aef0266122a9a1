use nalgebra::{Complex, DMatrix};

use super::convert::{gaussian_ket, gaussian_to_fock, mixture_to_fock};
use super::density::FockDensityMatrix;
use super::linalg::{blocks, eigenvalues, parity_sectors, root_fidelity};
use crate::error::{Error, Result};
use crate::mixture::GaussianMixture;
use crate::symplectic::{purity_gaussian, GaussianState};

type C64 = Complex<f64>;

/// Truncations discarding at most this much probability count as converged.
pub const CONVERGED_TRACE_DEFICIT: f64 = 1e-9;

fn same_space(a: &FockDensityMatrix, b: &FockDensityMatrix) -> Result<()> {
    if a.n_max() != b.n_max() || a.modes() != b.modes() {
        return Err(Error::Dimension(format!(
            "cutoffs differ: {} modes at {} vs {} modes at {}",
            a.modes(),
            a.n_max(),
            b.modes(),
            b.n_max()
        )));
    }
    Ok(())
}

/// `log2 || rho^{T_B} ||_1`, clamped at zero.
pub fn negativity_fock(rho: &FockDensityMatrix) -> Result<f64> {
    let herm = (rho.data() - rho.data().adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > 1e-10 {
        return Err(Error::InvalidParameter(format!("matrix is not Hermitian (deviation {herm:e})")));
    }
    let pt = rho.partial_transpose()?;
    let sectors = parity_sectors(rho.n_max(), 2);
    let norm: f64 = blocks(pt.data(), &sectors).iter().flat_map(|b| eigenvalues(b)).map(f64::abs).sum();
    Ok(norm.log2().max(0.0))
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)))^2`.
pub fn uhlmann_fidelity(rho1: &FockDensityMatrix, rho2: &FockDensityMatrix) -> Result<f64> {
    same_space(rho1, rho2)?;
    let sectors = parity_sectors(rho1.n_max(), rho1.modes());
    let b1 = blocks(rho1.data(), &sectors);
    let b2 = blocks(rho2.data(), &sectors);
    check_psd(&b1)?;
    let root: f64 = if b1.len() == b2.len() {
        b1.iter().zip(&b2).map(|(a, b)| root_fidelity(a, b)).sum()
    } else {
        root_fidelity(rho1.data(), rho2.data())
    };
    Ok((root * root).min(1.0))
}

fn check_psd(parts: &[DMatrix<C64>]) -> Result<()> {
    let lowest = parts.iter().flat_map(|b| eigenvalues(b)).fold(f64::INFINITY, f64::min);
    if lowest < -1e-9 {
        return Err(Error::InvalidParameter(format!("density matrix has eigenvalue {lowest:e}")));
    }
    Ok(())
}

/// `Tr rho^2`.
pub fn purity_fock(rho: &FockDensityMatrix) -> f64 {
    rho.data().iter().map(|z| z.norm_sqr()).sum()
}

/// `Tr(rho1 rho2)`.
pub fn overlap_fock(rho1: &FockDensityMatrix, rho2: &FockDensityMatrix) -> Result<f64> {
    same_space(rho1, rho2)?;
    Ok(rho1.data().iter().zip(rho2.data().iter()).map(|(a, b)| (a * b.conj()).re).sum())
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GaussianityReport {
    /// Uhlmann fidelity with the moment-matched Gaussian state.
    pub gaussianity: f64,
    /// `Tr(rho rho_G)`, kept as a diagnostic.
    pub overlap: f64,
    pub trace_deficit: f64,
    pub converged: bool,
}

fn reference_gaussian(mixture: &GaussianMixture) -> Result<GaussianState> {
    let (mean, cov) = mixture.mean_cov()?;
    if mean.amax() > 1e-12 {
        return Err(Error::InvalidParameter("Gaussianity is only defined here for zero-mean mixtures".into()));
    }
    GaussianState::new(mean, cov)
}

/// Fidelity between a zero-mean mixture and the Gaussian state with the same
/// first and second moments, both truncated at `n_max`.
pub fn gaussianity(mixture: &GaussianMixture, n_max: usize) -> Result<GaussianityReport> {
    let reference = reference_gaussian(mixture)?;
    let (rho_g, rep_g) = gaussian_to_fock(&reference, n_max)?;
    let all_pure = mixture.iter().all(|(_, s)| purity_gaussian(s).map(|p| (p - 1.0).abs() <= 1e-9).unwrap_or(false));
    let dim = rho_g.dim();
    let norm = mixture.norm();

    let (gaussianity, overlap, deficit) = if all_pure && mixture.len() < dim / 2 {
        // rho = B B^dag with rank <= N: F = (Tr sqrt(B^dag rho_G B))^2
        let mut b = DMatrix::<C64>::zeros(dim, mixture.len());
        let mut deficit = 0.0;
        for (col, (w, state)) in mixture.iter().enumerate() {
            let ket = gaussian_ket(state, n_max)?;
            deficit += w / norm * (1.0 - ket.norm_squared());
            b.set_column(col, &(ket * C64::new((w / norm).sqrt(), 0.0)));
        }
        let gram = b.adjoint() * rho_g.data() * &b;
        let root: f64 = eigenvalues(&gram).iter().map(|l| l.max(0.0).sqrt()).sum();
        let overlap = (0..gram.nrows()).map(|i| gram[(i, i)].re).sum();
        ((root * root).min(1.0), overlap, deficit)
    } else {
        let (rho, rep) = mixture_to_fock(mixture, n_max)?;
        (uhlmann_fidelity(&rho, &rho_g)?, overlap_fock(&rho, &rho_g)?, rep.trace_deficit)
    };
    let trace_deficit = deficit.max(rep_g.trace_deficit);
    let converged = trace_deficit <= CONVERGED_TRACE_DEFICIT;
    if !converged {
        return Err(Error::Truncation { n_max, deficit: trace_deficit });
    }
    Ok(GaussianityReport { gaussianity, overlap, trace_deficit, converged })
}

/// `Tr(rho rho_G)` with the moment-matched Gaussian.
pub fn gaussianity_overlap(mixture: &GaussianMixture, n_max: usize) -> Result<f64> {
    Ok(gaussianity(mixture, n_max)?.overlap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mixture::{dephased_tmsv, PhaseNoiseModel};
    use crate::symplectic::{log_negativity, phase_rotation};

    #[test]
    fn tmsv_negativity_matches_closed_form() {
        let r = 0.5;
        let (rho, _) = gaussian_to_fock(&GaussianState::two_mode_squeezed(r), 30).unwrap();
        let expected = 2.0 * r / std::f64::consts::LN_2;
        let en = negativity_fock(&rho).unwrap();
        assert!((en - expected).abs() < 1e-9, "{en} vs {expected}");
        let (vac, _) = gaussian_to_fock(&GaussianState::vacuum(2).unwrap(), 5).unwrap();
        assert_eq!(negativity_fock(&vac).unwrap(), 0.0);
    }

    #[test]
    fn fidelity_and_overlap_of_thermal_pair() {
        let a = GaussianState::thermal(0.2).unwrap();
        let b = GaussianState::thermal(0.6).unwrap();
        let (ra, _) = gaussian_to_fock(&a, 60).unwrap();
        let (rb, _) = gaussian_to_fock(&b, 60).unwrap();
        assert!((uhlmann_fidelity(&ra, &ra).unwrap() - 1.0).abs() < 1e-9);
        // commuting states: F = (sum sqrt(p_n q_n))^2
        let geo = |n: f64, k: i32| n.powi(k) / (1.0 + n).powi(k + 1);
        let root: f64 = (0..200).map(|k| (geo(0.2, k) * geo(0.6, k)).sqrt()).sum();
        assert!((uhlmann_fidelity(&ra, &rb).unwrap() - root * root).abs() < 1e-9);
        let ov = overlap_fock(&ra, &rb).unwrap();
        assert!((ov - gaussian_overlap_value(&a, &b)).abs() < 1e-10);
        assert!((purity_fock(&ra) - purity_gaussian(&a).unwrap()).abs() < 1e-12);
    }

    fn gaussian_overlap_value(a: &GaussianState, b: &GaussianState) -> f64 {
        crate::symplectic::gaussian_overlap(a, b).unwrap()
    }

    #[test]
    fn gaussian_state_has_unit_gaussianity() {
        let s = phase_rotation(2, 0, 0.3).unwrap().apply(&GaussianState::two_mode_squeezed(0.4)).unwrap();
        let report = gaussianity(&GaussianMixture::single(s), 30).unwrap();
        assert!((report.gaussianity - 1.0).abs() < 1e-9);
        assert!(report.converged);
    }

    #[test]
    fn dephased_state_oracles() {
        let mix = dephased_tmsv(0.5, &PhaseNoiseModel::new(1.0, 41).unwrap()).unwrap();
        let (rho, rep) = mixture_to_fock(&mix, 30).unwrap();
        assert!(rep.converged);
        assert!((purity_fock(&rho) - mix.purity().unwrap()).abs() < 1e-4);
        let g = gaussianity(&mix, 30).unwrap();
        assert!(g.gaussianity < 0.999 && g.gaussianity > 0.5, "{}", g.gaussianity);
        assert!(g.overlap <= g.gaussianity + 1e-12);
        // the phase mixture stays entangled in the number basis
        let en = negativity_fock(&rho).unwrap();
        let (m, c) = mix.mean_cov().unwrap();
        let moment_gaussian = GaussianState::new(m, c).unwrap();
        assert!(en > 0.0);
        assert_eq!(log_negativity(&moment_gaussian).unwrap(), 0.0);
    }

    #[test]
    fn low_rank_and_dense_routes_agree() {
        let mix = dephased_tmsv(0.4, &PhaseNoiseModel::new(0.8, 7).unwrap()).unwrap();
        let fast = gaussianity(&mix, 20).unwrap().gaussianity;
        let (rho, _) = mixture_to_fock(&mix, 20).unwrap();
        let (rho_g, _) = gaussian_to_fock(&reference_gaussian(&mix).unwrap(), 20).unwrap();
        let dense = uhlmann_fidelity(&rho, &rho_g).unwrap();
        assert!((fast - dense).abs() < 1e-8, "{fast} vs {dense}");
    }
}
