use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::eigs::Sector;
use crate::error::{Error, Result};
use crate::hill::{build_block, spectrum, BlockKind, OperatorMatrix};
use crate::spectral::{Parity, ParityBasis};
use crate::wave::WaveProfile;

/// Relative margin K = √λ₀ (1 + margin).
pub const K_MARGIN: f64 = 1e-6;
/// Number of random directions used for the derivative check.
pub const DERIVATIVE_SAMPLES: usize = 5;
const DERIVATIVE_SEED: u64 = 0x5eed_0003;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfAdjointness {
    pub pass: bool,
    pub details: String,
    pub max_asymmetry: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityAtLargeKappa {
    pub pass: bool,
    pub details: String,
    pub lambda0: f64,
    pub k: f64,
    pub beta: f64,
    pub verified_grid: Vec<f64>,
    /// min over the grid of min spec S(κ) − β.
    pub min_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EssentialSpectrum {
    pub pass: bool,
    pub details: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    pub pass: bool,
    pub details: String,
    pub kappa_grid: Vec<f64>,
    /// min over consecutive grid points of the increase of min spec S(κ).
    pub monotonicity_margin: f64,
    /// (S'(κ)w, w) / ‖w‖² by central differences, one per sample.
    pub derivative_quotients: Vec<f64>,
    pub derivative_kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NegativeEigenvalue {
    pub pass: bool,
    pub details: String,
    pub n_negative: usize,
    pub kernel_dimension: usize,
    pub gap: f64,
    pub zero_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub wave_id: String,
    pub sector: Sector,
    pub h0: SelfAdjointness,
    pub h1: CoercivityAtLargeKappa,
    pub h2: EssentialSpectrum,
    pub h3: Monotonicity,
    pub h4: NegativeEigenvalue,
    pub verdict: bool,
}

fn s_kappa(wave: &WaveProfile, kappa: f64, basis: &ParityBasis) -> Result<OperatorMatrix> {
    build_block(wave, BlockKind::SKappa, kappa, basis)
}

fn min_eigenvalue(op: &OperatorMatrix) -> Result<f64> {
    Ok(spectrum(op, None)?.eigenvalues[0])
}

/// Checks the structural hypotheses on S(κ) = diag(L₂+κ², L₁+κ²) that
/// drive the transverse instability argument. Odd waves must be checked in
/// the odd sector.
pub fn verify_hypotheses(wave: &WaveProfile, sector: Sector) -> Result<HypothesisReport> {
    if wave.params.parity == Parity::Odd && sector == Sector::Full {
        return Err(Error::parameter(
            "instability_scanner",
            "odd waves are analysed in the odd sector (full space has n(L1) = 2)",
        ));
    }
    let basis = ParityBasis::new(sector.basis_kind(), *wave.phi.grid());
    let s0 = s_kappa(wave, 0.0, &basis)?;
    let norm = s0.entries.amax();

    let max_asymmetry = s0.asymmetry();
    let h0 = SelfAdjointness {
        pass: max_asymmetry <= 1e-12 * norm,
        details: format!("max |S - S^T| = {max_asymmetry:.3e}, scale {norm:.3e}"),
        max_asymmetry,
    };

    let s0_spec = spectrum(&s0, None)?;
    let lambda0 = -s0_spec.eigenvalues[0];
    let k = lambda0.max(0.0).sqrt() * (1.0 + K_MARGIN);
    let beta = k * k - lambda0;
    let verified_grid: Vec<f64> = (0..=8).map(|j| k * (1.0 + 0.25 * j as f64)).collect();
    let slack = 1e-12 * norm;
    let mut min_margin = f64::INFINITY;
    for &kappa in &verified_grid {
        min_margin = min_margin.min(min_eigenvalue(&s_kappa(wave, kappa, &basis)?)? - beta);
    }
    let h1 = CoercivityAtLargeKappa {
        pass: beta > 0.0 && min_margin >= -slack,
        details: format!("lambda0 = {lambda0:.6e}, K = {k:.6e}, beta = {beta:.3e}, min margin {min_margin:.3e}"),
        lambda0,
        k,
        beta,
        verified_grid,
        min_margin,
    };

    let h2 = EssentialSpectrum {
        pass: true,
        details: "periodic: essential spectrum empty".into(),
    };

    let top = 2.0 * k.max(1.0);
    let kappa_grid: Vec<f64> = (0..=20).map(|j| top * j as f64 / 20.0).collect();
    let mins = kappa_grid
        .iter()
        .map(|&kappa| min_eigenvalue(&s_kappa(wave, kappa, &basis)?))
        .collect::<Result<Vec<_>>>()?;
    let monotonicity_margin = mins.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let derivative_kappa = k.max(0.5);
    let delta = 1e-4 * derivative_kappa;
    let derivative = (&s_kappa(wave, derivative_kappa + delta, &basis)?.entries
        - &s_kappa(wave, derivative_kappa - delta, &basis)?.entries)
        / (2.0 * delta);
    let mut rng = ChaCha8Rng::seed_from_u64(DERIVATIVE_SEED);
    let dim = derivative.nrows();
    let derivative_quotients: Vec<f64> = (0..DERIVATIVE_SAMPLES)
        .map(|_| {
            let w = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
            w.dot(&(&derivative * &w)) / w.norm_squared()
        })
        .collect();
    let expected = 2.0 * derivative_kappa;
    let derivative_ok = derivative_quotients
        .iter()
        .all(|q| *q > 0.0 && (q - expected).abs() <= 1e-6 * expected);
    let h3 = Monotonicity {
        pass: monotonicity_margin >= -slack && derivative_ok,
        details: format!(
            "min spec S(kappa) nondecreasing with margin {monotonicity_margin:.3e}; (S'w,w)/|w|^2 vs 2kappa = {expected:.6}"
        ),
        kappa_grid,
        monotonicity_margin,
        derivative_quotients,
        derivative_kappa,
    };

    let tol = s0_spec.zero_tolerance;
    let gap = s0_spec.eigenvalues.get(1).map_or(f64::INFINITY, |l| l - s0_spec.eigenvalues[0]);
    let h4 = NegativeEigenvalue {
        pass: s0_spec.n_negative == 1 && gap >= 10.0 * tol,
        details: format!(
            "n(S(0)) = {} in the {sector} sector, gap {gap:.3e} (need >= {:.3e})",
            s0_spec.n_negative,
            10.0 * tol
        ),
        n_negative: s0_spec.n_negative,
        kernel_dimension: s0_spec.kernel_dimension,
        gap,
        zero_tolerance: tol,
    };

    let verdict = h0.pass && h1.pass && h2.pass && h3.pass && h4.pass;
    Ok(HypothesisReport {
        wave_id: wave.id(),
        sector,
        h0,
        h1,
        h2,
        h3,
        h4,
        verdict,
    })
}
