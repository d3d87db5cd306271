mod common;

use std::sync::OnceLock;

use common::*;
use nalgebra::DVector;
use proptest::prelude::*;
use transverse_core::hill::{build_block, spectrum, BlockKind};
use transverse_core::scanner::{instability_eigs, quadruple_symmetry_defect, Sector};
use transverse_core::spectral::{build_grid, BasisKind, Parity, ParityBasis, RealField};
use transverse_core::wave::WaveProfile;

fn even_wave() -> &'static WaveProfile {
    static WAVE: OnceLock<WaveProfile> = OnceLock::new();
    WAVE.get_or_init(|| solve(2.0, 1.0, Parity::Even, 32))
}

/// Trigonometric polynomial Σ a_k cos kx + b_k sin kx for k < len.
fn trig(grid_modes: usize, a: &[f64], b: &[f64]) -> RealField {
    let grid = build_grid(TWO_PI, grid_modes).unwrap();
    RealField::from_fn(grid, Parity::None, |x| {
        a.iter().zip(b).enumerate().map(|(k, (a, b))| a * (k as f64 * x).cos() + b * (k as f64 * x).sin()).sum()
    })
    .unwrap()
}

fn coeffs(len: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (prop::collection::vec(-1.0..1.0_f64, len), prop::collection::vec(-1.0..1.0_f64, len))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_in_every_basis(values in prop::collection::vec(-10.0..10.0_f64, 32)) {
        let grid = build_grid(TWO_PI, 32).unwrap();
        let u = RealField::untagged(grid, values).unwrap();
        let full = ParityBasis::new(BasisKind::FullFourier, grid).project(&u).unwrap();
        prop_assert!((full.norm() - u.norm()).abs() <= 1e-12 * u.norm().max(1.0));
        let even = u.project_parity(Parity::Even);
        let odd = u.project_parity(Parity::Odd);
        let c = ParityBasis::new(BasisKind::Cosine, grid).project(&even).unwrap();
        let s = ParityBasis::new(BasisKind::Sine, grid).project(&odd).unwrap();
        prop_assert!((c.norm_squared() + s.norm_squared() - u.norm().powi(2)).abs() <= 1e-11 * u.norm().powi(2).max(1.0));
    }

    #[test]
    fn parity_parts_reconstruct(values in prop::collection::vec(-10.0..10.0_f64, 24)) {
        let grid = build_grid(TWO_PI, 24).unwrap();
        let u = RealField::untagged(grid, values).unwrap();
        let even = u.project_parity(Parity::Even);
        let odd = u.project_parity(Parity::Odd);
        prop_assert!(max_abs_diff(even.add(&odd).values(), u.values()) <= 1e-14 * u.max_abs().max(1.0));
        prop_assert!(even.parity_defect(Parity::Even) <= 1e-14 * u.max_abs().max(1.0));
        prop_assert!(odd.parity_defect(Parity::Odd) <= 1e-14 * u.max_abs().max(1.0));
        prop_assert!(even.inner(&odd).abs() <= 1e-12 * u.norm().powi(2).max(1.0));
    }

    #[test]
    fn synthesize_inverts_project((a, b) in coeffs(8)) {
        let u = trig(32, &a, &b);
        let basis = ParityBasis::new(BasisKind::FullFourier, *u.grid());
        let c = basis.project(&u).unwrap();
        let back = basis.synthesize(&c);
        prop_assert!(max_abs_diff(back.values(), u.values()) <= 1e-13);
        let again = basis.project(&back).unwrap();
        prop_assert!((again - DVector::from_column_slice(c.as_slice())).amax() <= 1e-13);
    }

    #[test]
    fn grid_refinement_keeps_resolved_fields((a, b) in coeffs(8)) {
        let coarse = trig(32, &a, &b);
        let fine = coarse.resample(64).unwrap();
        let exact = trig(64, &a, &b);
        prop_assert!(max_abs_diff(fine.values(), exact.values()) <= 1e-13);
        let back = fine.resample(32).unwrap();
        prop_assert!(max_abs_diff(back.values(), coarse.values()) <= 1e-13);
        prop_assert!((fine.integrate() - coarse.integrate()).abs() <= 1e-12);
    }

    #[test]
    fn fourth_derivative_matches_the_analytic_symbol((a, b) in coeffs(8)) {
        let u = trig(32, &a, &b);
        let twice = u.second_derivative().second_derivative();
        let k4: Vec<f64> = (0..8).map(|k| (k as f64).powi(4)).collect();
        let a4: Vec<f64> = a.iter().zip(&k4).map(|(a, k)| a * k).collect();
        let b4: Vec<f64> = b.iter().zip(&k4).map(|(b, k)| b * k).collect();
        let exact = trig(32, &a4, &b4);
        prop_assert!(max_abs_diff(twice.values(), exact.values()) <= 1e-11 * exact.max_abs().max(1.0));
        let d2 = u.derivative().derivative();
        prop_assert!(max_abs_diff(d2.values(), u.second_derivative().values()) <= 1e-12 * 64.0);
    }

    #[test]
    fn s_kappa_is_a_shift_of_s_zero(kappa in 0.0..3.0_f64) {
        let wave = even_wave();
        let basis = ParityBasis::new(BasisKind::FullFourier, *wave.phi.grid());
        let s0 = spectrum(&build_block(wave, BlockKind::SKappa, 0.0, &basis).unwrap(), None).unwrap();
        let sk = spectrum(&build_block(wave, BlockKind::SKappa, kappa, &basis).unwrap(), None).unwrap();
        for (a, b) in s0.eigenvalues.iter().zip(&sk.eigenvalues) {
            prop_assert!((a + kappa * kappa - b).abs() <= 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn instability_spectrum_has_hamiltonian_symmetry(kappa in 0.05..2.5_f64) {
        let spec = instability_eigs(even_wave(), kappa, Sector::Full).unwrap();
        prop_assert!(quadruple_symmetry_defect(&spec.eigenvalues) <= 1e-8);
        prop_assert!(spec.consistency_mismatch <= 1e-7);
        prop_assert!(spec.max_real_part >= 0.0);
    }
}
