mod common;

use common::*;
use nalgebra::DVector;
use transverse_core::dns::*;
use transverse_core::scanner::{block_matrix, instability_eigs, scan_kappa, Sector};
use transverse_core::spectral::Parity;
use transverse_core::Error;

fn rk4(dt: f64, t: f64, seed: Seed) -> EvolutionConfig {
    EvolutionConfig::new(dt, t, Scheme::ExplicitRk4, seed)
}

#[test]
fn rhs_matches_the_block_matrix() {
    let wave = solve(2.0, 1.0, Parity::Even, 32);
    let kappa = 0.6;
    let (basis, block) = block_matrix(&wave, kappa, Sector::Full).unwrap();
    let m = basis.dimension();
    let c = DVector::from_fn(2 * m, |k, _| ((k * 7 % 11) as f64 - 5.0) / (1.0 + (k % m) as f64).powi(2));
    let v1 = basis.synthesize(&c.rows(0, m).into_owned());
    let v2 = basis.synthesize(&c.rows(m, m).into_owned());
    let (d1, d2) = linearized_rhs(&v1, &v2, &wave, kappa).unwrap();
    let expected = &block * &c;
    let got1 = basis.project(&d1).unwrap();
    let got2 = basis.project(&d2).unwrap();
    let scale = expected.amax();
    assert!((got1 - expected.rows(0, m)).amax() <= 1e-12 * scale);
    assert!((got2 - expected.rows(m, m)).amax() <= 1e-12 * scale);
}

#[test]
fn rhs_of_an_eigenvector() {
    let wave = solve(2.0, 1.0, Parity::Even, 64);
    let spec = instability_eigs(&wave, 0.5, Sector::Full).unwrap();
    let mode = spec.leading().expect("the even wave is unstable at kappa = 0.5");
    let (d1, _) = linearized_rhs(&mode.v1.re, &mode.v2.re, &wave, 0.5).unwrap();
    let (e1, _) = linearized_rhs(&mode.v1.im, &mode.v2.im, &wave, 0.5).unwrap();
    let l = mode.lambda;
    let want_re = mode.v1.re.scale(l.re).axpy(-l.im, &mode.v1.im);
    let want_im = mode.v1.im.scale(l.re).axpy(l.im, &mode.v1.re);
    assert!(d1.sub(&want_re).norm() <= 1e-7);
    assert!(e1.sub(&want_im).norm() <= 1e-7);
}

#[test]
fn constant_wave_grows_at_unit_rate() {
    let wave = constant_wave(2.0, 32);
    let m = evolve_and_fit(&wave, 1.0, &rk4(5e-3, 20.0, Seed::LeadingEigenvector)).unwrap();
    assert!(m.window_complete);
    assert!((m.fitted_rate - 1.0).abs() <= 0.01, "{}", m.fitted_rate);
    assert!(m.accepted());
    assert!((m.scanner_lambda - 1.0).abs() < 1e-10);
}

#[test]
fn constant_wave_is_neutral_at_kappa_two() {
    let wave = constant_wave(2.0, 32);
    let m = evolve_and_fit(&wave, 2.0, &rk4(5e-3, 20.0, Seed::Random { seed: 7 })).unwrap();
    assert!(m.fitted_rate <= 1e-3, "{}", m.fitted_rate);
    assert!(m.max_amplification <= 10.0);
    assert!(m.norms.iter().all(|n| *n >= m.norms[0] / 10.0));
}

#[test]
fn even_wave_rate_matches_the_scanner() {
    let wave = solve(2.0, 1.0, Parity::Even, 64);
    let scan = scan_kappa(&wave, 0.05, 1.5, 15, Sector::Full).unwrap();
    let kappa = scan.kappa_at_max_growth;
    let lambda = scan.max_growth_rate;
    let dt = 2.0 / (64.0 * 64.0 / 4.0 + 10.0);
    let config = rk4(dt, 40.0 / lambda, Seed::LeadingEigenvector);
    let m = evolve_and_fit(&wave, kappa, &config).unwrap();
    assert!(m.relative_gap.unwrap() <= 0.02, "{m:?}");
    assert!((m.scanner_lambda - lambda).abs() < 1e-10);
}

/// Least-squares slope of log-norm over samples with t ≥ t0.
fn late_slope(m: &GrowthMeasurement, t0: f64) -> f64 {
    let pts: Vec<(f64, f64)> = m.times.iter().zip(&m.norms).filter(|(t, _)| **t >= t0).map(|(t, n)| (*t, n.ln())).collect();
    let k = pts.len() as f64;
    let (mt, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / k, a.1 + p.1 / k));
    let num: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    num / den
}

#[test]
fn random_seeds_converge_to_the_leading_rate() {
    let wave = constant_wave(2.0, 16);
    let exact = (0.81 * (2.0 - 0.81_f64)).sqrt();
    let mut rates = Vec::new();
    for seed in [1_u64, 2, 3] {
        let mut config = rk4(5e-3, 30.0, Seed::Random { seed });
        config.stop_after_window = false;
        let m = evolve_and_fit(&wave, 0.9, &config).unwrap();
        assert!(m.window_complete);
        rates.push(late_slope(&m, 15.0));
    }
    for r in &rates {
        assert!((r - exact).abs() <= 0.02 * exact, "{r} vs {exact}");
    }
    let spread = rates.iter().cloned().fold(f64::MIN, f64::max) - rates.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread <= 0.02 * exact, "{rates:?}");
}

#[test]
fn splitting_preserves_the_norm_of_an_oscillating_mode() {
    let wave = constant_wave(2.0, 16);
    let mut config = EvolutionConfig::new(1e-3, 10.0, Scheme::SplittingOrder2, Seed::LeadingEigenvector);
    config.stop_after_window = false;
    let m = evolve_and_fit(&wave, 2.0, &config).unwrap();
    let n0 = m.norms[0];
    let drift = m.norms.iter().fold(0.0_f64, |d, n| d.max((n - n0).abs() / n0));
    assert!(drift <= 1e-6, "{drift}");
    assert!(*m.times.last().unwrap() >= 10.0 - 1e-9);
}

#[test]
fn splitting_and_rk4_agree_on_growth() {
    let wave = solve(2.0, 1.0, Parity::Even, 32);
    let kappa = 0.6;
    let lambda = instability_eigs(&wave, kappa, Sector::Full).unwrap().max_real_part;
    let split = EvolutionConfig::new(2e-4, 40.0 / lambda, Scheme::SplittingOrder2, Seed::LeadingEigenvector);
    let m = evolve_and_fit(&wave, kappa, &split).unwrap();
    assert!(m.relative_gap.unwrap() <= 0.02, "{m:?}");
}

#[test]
fn odd_sector_evolution() {
    let wave = solve(2.0, 4.0, Parity::Odd, 64);
    let scan = scan_kappa(&wave, 0.1, 3.0, 12, Sector::Odd).unwrap();
    assert!(scan.transversally_unstable);
    let config = rk4(2.0 / (32.0 * 32.0 + 20.0), 40.0 / scan.max_growth_rate, Seed::LeadingEigenvector).with_sector(Sector::Odd);
    let m = evolve_and_fit(&wave, scan.kappa_at_max_growth, &config).unwrap();
    assert!(m.relative_gap.unwrap() <= 0.02, "{m:?}");
}

#[test]
fn unstable_time_step_is_reported() {
    let wave = constant_wave(2.0, 16);
    let err = evolve_and_fit(&wave, 1.0, &rk4(1.0, 20.0, Seed::Random { seed: 1 })).unwrap_err();
    assert!(matches!(err, Error::Parameter { .. }), "{err}");
    assert!(evolve_and_fit(&wave, 0.0, &rk4(1e-3, 1.0, Seed::Random { seed: 1 })).is_err());
}
