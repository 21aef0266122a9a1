mod common;

use gaussify::fock::{
    gaussian_to_fock, gaussianity, mixture_to_fock, negativity_fock, purity_fock, tmsv_fock, FockDensityMatrix,
};
use gaussify::mixture::{dephased_tmsv, GaussianMixture, PhaseNoiseModel};
use gaussify::GaussianState;
use nalgebra::Complex;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn tmsv_constructions_agree() {
    let (rho, report) = gaussian_to_fock(&GaussianState::two_mode_squeezed(0.5), 30).unwrap();
    assert!(report.trace_deficit < 1e-10);
    let direct = tmsv_fock(0.5, 30).unwrap();
    let diff = (rho.data() - direct.data()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-8, "{diff}");
    assert!((negativity_fock(&rho).unwrap() - 1.0 / std::f64::consts::LN_2).abs() < 1e-6);
}

#[test]
fn thermal_distribution() {
    let (rho, _) = gaussian_to_fock(&GaussianState::thermal(1.0).unwrap(), 40).unwrap();
    for n in 0..10 {
        let p = rho.data()[(n, n)].re;
        assert!((p - 0.5f64.powi(n as i32 + 1)).abs() < 1e-12);
    }
    assert!((purity_fock(&rho) - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn partial_transpose_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (rho, _) = gaussian_to_fock(&common::random_state(&mut rng, 2, 1.5, 0.2), 20).unwrap();
    let pt = rho.partial_transpose().unwrap();
    assert_eq!(pt.partial_transpose().unwrap().data(), rho.data());
    assert_eq!(pt.trace(), rho.trace());
}

/// `<n,n| rho |m,m>` of phase-diffused TMSV is the TMSV element damped by
/// `exp(-sigma^2 (n - m)^2)`.
fn damped_tmsv(r: f64, sigma: f64, n_max: usize) -> FockDensityMatrix {
    let tmsv = tmsv_fock(r, n_max).unwrap();
    let c = n_max + 1;
    let data = tmsv.data().map_with_location(|i, j, z| {
        let (n, m) = ((i / c) as f64, (j / c) as f64);
        z * Complex::new((-sigma * sigma * (n - m) * (n - m)).exp(), 0.0)
    });
    FockDensityMatrix::new(n_max, 2, data).unwrap()
}

#[test]
fn dephasing_damps_number_coherences() {
    let (r, sigma, n_max) = (0.5, 1.0, 24);
    let model = PhaseNoiseModel::resolved(sigma, r).unwrap();
    let (rho, _) = mixture_to_fock(&dephased_tmsv(r, &model).unwrap(), n_max).unwrap();
    let expected = damped_tmsv(r, sigma, n_max);
    let diff = (rho.data() - expected.data()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    assert!(diff < 1e-9, "{diff}");
    let en = negativity_fock(&expected).unwrap();
    assert!((negativity_fock(&rho).unwrap() - en).abs() < 1e-8);
    assert!(en > 0.0 && en < 1.0 / std::f64::consts::LN_2);
}

#[test]
fn gaussianity_is_continuous_at_zero_phase_noise() {
    let g: Vec<f64> = [0.0, 0.01, 0.05, 0.2]
        .iter()
        .map(|&s| gaussianity(&dephased_tmsv(0.5, &PhaseNoiseModel::new(s, 41).unwrap()).unwrap(), 24).unwrap().gaussianity)
        .collect();
    assert!((g[0] - 1.0).abs() < 1e-9);
    assert!(g.windows(2).all(|w| w[1] < w[0] + 1e-12), "{g:?}");
    assert!(1.0 - g[1] < 1e-3);
}

#[test]
fn equal_weights_of_one_state_match_single_conversion() {
    let s = GaussianState::two_mode_squeezed(0.3);
    let mix = GaussianMixture::new(vec![(0.5, s.clone()), (0.5, s.clone())]).unwrap();
    let (a, _) = mixture_to_fock(&mix, 16).unwrap();
    let (b, _) = gaussian_to_fock(&s, 16).unwrap();
    assert!((a.data() - b.data()).iter().all(|z| z.norm() < 1e-14));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn moments_survive_conversion(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = common::random_state(&mut rng, 2, 2.0, 0.25);
        let (rho, report) = gaussian_to_fock(&state, 30).unwrap();
        let tol = (10.0 * report.trace_deficit).max(1e-6);
        prop_assert!((rho.covariance() - state.cov()).amax() < tol);
    }

    #[test]
    fn doubling_the_cutoff_is_stable(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let state = common::random_state(&mut rng, 2, 1.5, 0.2);
        let (a, _) = gaussian_to_fock(&state, 15).unwrap();
        let (b, _) = gaussian_to_fock(&state, 30).unwrap();
        prop_assert!((purity_fock(&a) - purity_fock(&b)).abs() < 1e-4);
        prop_assert!((negativity_fock(&a).unwrap() - negativity_fock(&b).unwrap()).abs() < 1e-4);
    }
}
