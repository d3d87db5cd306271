//! Time integration of the linearized transverse perturbation
//! v = cos(κy)(v₁ + i v₂) and measurement of its exponential growth rate.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{apply_hill, HillKind};
use crate::scanner::{eigenvalues_of, inverse_iteration, BlockOperators, Sector, GROWTH_THRESHOLD};
use crate::spectral::{ParityBasis, RealField};
use crate::wave::{power_potential, WaveProfile};

/// RK4 is stable on the imaginary axis for |λ dt| ≤ 2√2; this stays inside.
pub const RK4_STABILITY: f64 = 2.8;
/// Accepted measurements fit the log-norm to within this RMS deviation.
pub const FIT_RESIDUAL_LIMIT: f64 = 0.05;
/// Norm growth allowed above C e^{3 max Re λ t} before the run is aborted.
const RUNAWAY_FACTOR: f64 = 1e2;
/// Upper bound on the number of stored samples.
const MAX_SAMPLES: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Strang splitting of the Fourier-diagonal and pointwise parts.
    SplittingOrder2,
    ExplicitRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Seed {
    /// Eigenvector of the eigenvalue with the largest real part.
    LeadingEigenvector,
    Random { seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub time_step: f64,
    pub final_time: f64,
    pub scheme: Scheme,
    pub seed: Seed,
    /// The odd sector keeps the perturbation odd in x.
    pub sector: Sector,
    /// Stop once the fit window has closed.
    pub stop_after_window: bool,
}

impl EvolutionConfig {
    pub fn new(time_step: f64, final_time: f64, scheme: Scheme, seed: Seed) -> Self {
        EvolutionConfig {
            time_step,
            final_time,
            scheme,
            seed,
            sector: Sector::Full,
            stop_after_window: true,
        }
    }

    pub fn with_sector(self, sector: Sector) -> Self {
        EvolutionConfig { sector, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let dt = self.time_step;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::parameter("dns_validator", format!("time step must be positive, got {dt}")));
        }
        if !(self.final_time.is_finite() && self.final_time >= 10.0 * dt) {
            return Err(Error::parameter(
                "dns_validator",
                format!("final time {} must be at least 10 time steps", self.final_time),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthMeasurement {
    pub kappa: f64,
    pub scheme: Scheme,
    pub time_step: f64,
    pub times: Vec<f64>,
    /// ‖(v₁, v₂)‖ in L² (real and imaginary parts of a complex seed combined).
    pub norms: Vec<f64>,
    pub fitted_rate: f64,
    /// RMS deviation of log-norm from the fitted line over the window.
    pub fit_residual: f64,
    pub window: (f64, f64),
    /// True when the norm grew by e² after first doubling.
    pub window_complete: bool,
    /// max Re λ from the block eigenproblem at the same κ.
    pub scanner_lambda: f64,
    /// |fitted − scanner| / scanner, when the scanner reports growth.
    pub relative_gap: Option<f64>,
    /// max ‖v(t)‖ / ‖v(0)‖.
    pub max_amplification: f64,
}

impl GrowthMeasurement {
    pub fn accepted(&self) -> bool {
        self.fit_residual <= FIT_RESIDUAL_LIMIT
    }
}

/// (L₂v₂ + κ²v₂, −L₁v₁ − κ²v₁) evaluated pseudo-spectrally on the grid.
pub fn linearized_rhs(v1: &RealField, v2: &RealField, wave: &WaveProfile, kappa: f64) -> Result<(RealField, RealField)> {
    let grid = wave.phi.grid();
    if v1.grid() != grid || v2.grid() != grid {
        return Err(Error::parameter("dns_validator", "perturbation is not on the wave grid"));
    }
    let k2 = kappa * kappa;
    let d1 = apply_hill(wave, HillKind::L2, v2).axpy(k2, v2);
    let d2 = apply_hill(wave, HillKind::L1, v1).axpy(k2, v1).scale(-1.0);
    Ok((d1, d2))
}

/// I + X + X²/2 + X³/6 + X⁴/24 with X = dt M.
fn rk4_step_matrix(block: &DMatrix<f64>, dt: f64) -> DMatrix<f64> {
    let n = block.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let x = block * dt;
    let mut acc = &id + &x / 4.0;
    acc = &id + &x * acc / 3.0;
    acc = &id + &x * acc / 2.0;
    &id + &x * acc
}

/// e^{dt/2 M_D} e^{dt M_Q} e^{dt/2 M_D}, where M_D carries −∂² + ω + κ² and
/// M_Q the multiplicative part −c_i |φ|^α of the two Hill operators.
fn splitting_step_matrix(wave: &WaveProfile, basis: &ParityBasis, kappa: f64, dt: f64) -> DMatrix<f64> {
    let m = basis.dimension();
    let (alpha, omega) = (wave.params.alpha, wave.params.omega);
    let mut half = DMatrix::zeros(2 * m, 2 * m);
    for (k, xi) in basis.wavenumbers().into_iter().enumerate() {
        let theta = 0.5 * dt * (xi * xi + omega + kappa * kappa);
        let (s, c) = theta.sin_cos();
        half[(k, k)] = c;
        half[(k, m + k)] = s;
        half[(m + k, k)] = -s;
        half[(m + k, m + k)] = c;
    }

    // Pointwise exp(dt [[0, q₂], [−q₁, 0]]) with q₁ = −(α+1)|φ|^α, q₂ = −|φ|^α.
    let p = power_potential(&wave.phi, alpha);
    let n = p.values().len();
    let (mut e11, mut e12, mut e21, mut e22) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for (j, &pj) in p.values().iter().enumerate() {
        let (q1, q2) = (-(alpha + 1.0) * pj, -pj);
        let prod = q1 * q2;
        let (c, sinc) = if prod > 0.0 {
            let w = prod.sqrt();
            ((w * dt).cos(), (w * dt).sin() / w)
        } else if prod < 0.0 {
            let w = (-prod).sqrt();
            ((w * dt).cosh(), (w * dt).sinh() / w)
        } else {
            (1.0, dt)
        };
        e11[j] = c;
        e12[j] = q2 * sinc;
        e21[j] = -q1 * sinc;
        e22[j] = c;
    }
    let mut pointwise = DMatrix::zeros(2 * m, 2 * m);
    pointwise.view_mut((0, 0), (m, m)).copy_from(&basis.multiplication_matrix(&e11));
    pointwise.view_mut((0, m), (m, m)).copy_from(&basis.multiplication_matrix(&e12));
    pointwise.view_mut((m, 0), (m, m)).copy_from(&basis.multiplication_matrix(&e21));
    pointwise.view_mut((m, m), (m, m)).copy_from(&basis.multiplication_matrix(&e22));
    &half * pointwise * &half
}

/// One-step propagator of the linearized system in the sector basis.
pub fn step_matrix(wave: &WaveProfile, kappa: f64, scheme: Scheme, sector: Sector, dt: f64) -> Result<DMatrix<f64>> {
    let ops = BlockOperators::new(wave, kappa, sector)?;
    Ok(match scheme {
        Scheme::ExplicitRk4 => rk4_step_matrix(&ops.block(), dt),
        Scheme::SplittingOrder2 => splitting_step_matrix(wave, &ops.basis, kappa, dt),
    })
}

/// Least-squares slope of log y against t and the RMS deviation.
fn fit_log_slope(t: &[f64], y: &[f64]) -> (f64, f64) {
    let n = t.len() as f64;
    let logs: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mt, ml) = (t.iter().sum::<f64>() / n, logs.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (ti, li) in t.iter().zip(&logs) {
        sxy += (ti - mt) * (li - ml);
        sxx += (ti - mt) * (ti - mt);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rms = (t
        .iter()
        .zip(&logs)
        .map(|(ti, li)| (li - ml - slope * (ti - mt)).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, rms)
}

fn random_seed(dimension: usize, wavenumbers: &[f64], seed: u64) -> DVector<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(2 * dimension, |k, _| {
        let xi = wavenumbers[k % dimension];
        rng.random_range(-1.0..1.0) / (1.0 + xi * xi)
    });
    v /= v.norm();
    v
}

/// Integrates the linearized system from the configured seed and fits the
/// exponential growth rate over the window from the first doubling of the
/// norm until a further growth by e².
pub fn evolve_and_fit(wave: &WaveProfile, kappa: f64, config: &EvolutionConfig) -> Result<GrowthMeasurement> {
    config.validate()?;
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::parameter("dns_validator", format!("kappa must be positive, got {kappa}")));
    }
    let ops = BlockOperators::new(wave, kappa, config.sector)?;
    let block = ops.block();
    let eigenvalues = eigenvalues_of(block.clone());
    let scanner_lambda = eigenvalues[0].re.max(0.0);
    let dt = config.time_step;
    if config.scheme == Scheme::ExplicitRk4 {
        let radius = eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.norm()));
        if dt * radius > RK4_STABILITY {
            return Err(Error::parameter(
                "dns_validator",
                format!(
                    "time step {dt} exceeds the RK4 stability bound {:.3e} (spectral radius {radius:.3e})",
                    RK4_STABILITY / radius
                ),
            ));
        }
    }
    let propagator = match config.scheme {
        Scheme::ExplicitRk4 => rk4_step_matrix(&block, dt),
        Scheme::SplittingOrder2 => splitting_step_matrix(wave, &ops.basis, kappa, dt),
    };

    // Real and imaginary parts evolve independently under the real system.
    let mut states: Vec<DVector<f64>> = match config.seed {
        Seed::LeadingEigenvector => {
            let (x, _) = inverse_iteration(&block, eigenvalues[0]);
            let re = x.map(|c: Complex64| c.re);
            let im = x.map(|c: Complex64| c.im);
            if im.norm() > 1e-12 {
                vec![re, im]
            } else {
                vec![re]
            }
        }
        Seed::Random { seed } => vec![random_seed(ops.basis.dimension(), &ops.basis.wavenumbers(), seed)],
    };
    let norm_of = |s: &[DVector<f64>]| s.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt();
    let initial = norm_of(&states);

    let steps = (config.final_time / dt).round() as usize;
    let stride = steps.div_ceil(MAX_SAMPLES).max(1);
    let mut times = vec![0.0];
    let mut norms = vec![initial];
    let mut doubled_at: Option<usize> = None;
    let mut closed_at: Option<usize> = None;
    for step in 1..=steps {
        for s in states.iter_mut() {
            *s = &propagator * &*s;
        }
        if step % stride != 0 && step != steps {
            continue;
        }
        let t = step as f64 * dt;
        let norm = norm_of(&states);
        let envelope = RUNAWAY_FACTOR * initial * (3.0 * scanner_lambda * t).exp();
        if !norm.is_finite() || norm > envelope {
            return Err(Error::Integrator {
                time: t,
                growth: norm / initial,
            });
        }
        times.push(t);
        norms.push(norm);
        let idx = norms.len() - 1;
        match doubled_at {
            None if norm >= 2.0 * initial => doubled_at = Some(idx),
            Some(d) if closed_at.is_none() && norm >= norms[d] * std::f64::consts::E.powi(2) => {
                closed_at = Some(idx);
                if config.stop_after_window {
                    break;
                }
            }
            _ => {}
        }
    }

    let (lo, hi) = match (doubled_at, closed_at) {
        (Some(d), Some(c)) => (d, c),
        (Some(d), None) => (d, norms.len() - 1),
        _ => (0, norms.len() - 1),
    };
    let (lo, hi) = if hi > lo { (lo, hi) } else { (0, norms.len() - 1) };
    let (fitted_rate, fit_residual) = fit_log_slope(&times[lo..=hi], &norms[lo..=hi]);
    let max_amplification = norms.iter().fold(0.0_f64, |m, v| m.max(*v)) / initial;
    Ok(GrowthMeasurement {
        kappa,
        scheme: config.scheme,
        time_step: dt,
        window: (times[lo], times[hi]),
        window_complete: closed_at.is_some(),
        relative_gap: (scanner_lambda > GROWTH_THRESHOLD)
            .then(|| (fitted_rate - scanner_lambda).abs() / scanner_lambda),
        times,
        norms,
        fitted_rate,
        fit_residual,
        scanner_lambda,
        max_amplification,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_grid, BasisKind, Parity};
    use crate::wave::ProblemParams;
    use std::f64::consts::PI;

    fn constant_wave(modes: usize) -> WaveProfile {
        let grid = build_grid(2.0 * PI, modes).unwrap();
        let params = ProblemParams::new(2.0, 1.0, 2.0 * PI, 2.0 * PI, Parity::Even).unwrap();
        WaveProfile::from_field(params, RealField::constant(grid, 1.0), 1.0)
    }

    #[test]
    fn zero_maps_to_zero() {
        let wave = constant_wave(16);
        let z = RealField::zeros(*wave.phi.grid(), Parity::None);
        let (a, b) = linearized_rhs(&z, &z, &wave, 1.3).unwrap();
        assert_eq!(a.max_abs(), 0.0);
        assert_eq!(b.max_abs(), 0.0);
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let wave = constant_wave(16);
        let other = RealField::zeros(build_grid(2.0 * PI, 32).unwrap(), Parity::None);
        assert!(linearized_rhs(&other, &other, &wave, 1.0).is_err());
    }

    #[test]
    fn constant_wave_single_mode() {
        let wave = constant_wave(16);
        let grid = *wave.phi.grid();
        let (n, kappa) = (3.0, 0.7);
        let v1 = RealField::from_fn(grid, Parity::Even, |x| (n * x).cos()).unwrap();
        let v2 = RealField::from_fn(grid, Parity::Even, |x| 0.4 * (n * x).cos()).unwrap();
        let (a, b) = linearized_rhs(&v1, &v2, &wave, kappa).unwrap();
        let d = n * n + kappa * kappa;
        for j in 0..grid.len() {
            let c = (n * grid.node(j)).cos();
            assert!((a.values()[j] - d * 0.4 * c).abs() < 1e-12);
            assert!((b.values()[j] + (d - 2.0) * c).abs() < 1e-12);
        }
    }

    #[test]
    fn splitting_is_time_reversible() {
        let wave = constant_wave(16);
        let forward = step_matrix(&wave, 1.5, Scheme::SplittingOrder2, Sector::Full, 1e-2).unwrap();
        let backward = step_matrix(&wave, 1.5, Scheme::SplittingOrder2, Sector::Full, -1e-2).unwrap();
        let n = forward.nrows();
        assert!((forward * backward - DMatrix::<f64>::identity(n, n)).amax() < 1e-12);
    }

    #[test]
    fn rk4_bound_is_enforced() {
        let wave = constant_wave(32);
        let config = EvolutionConfig::new(0.1, 10.0, Scheme::ExplicitRk4, Seed::Random { seed: 1 });
        assert!(matches!(evolve_and_fit(&wave, 1.0, &config), Err(Error::Parameter { .. })));
    }

    #[test]
    fn config_validation() {
        let c = EvolutionConfig::new(0.1, 0.5, Scheme::SplittingOrder2, Seed::LeadingEigenvector);
        assert!(c.validate().is_err());
        let c = EvolutionConfig::new(-0.1, 5.0, Scheme::SplittingOrder2, Seed::LeadingEigenvector);
        assert!(c.validate().is_err());
    }

    #[test]
    fn log_fit_of_exact_exponential() {
        let t: Vec<f64> = (0..50).map(|k| k as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|t| 3.0 * (0.7 * t).exp()).collect();
        let (rate, rms) = fit_log_slope(&t, &y);
        assert!((rate - 0.7).abs() < 1e-12);
        assert!(rms < 1e-12);
    }

    #[test]
    fn random_seed_is_deterministic() {
        let basis = ParityBasis::new(BasisKind::FullFourier, build_grid(2.0 * PI, 16).unwrap());
        let a = random_seed(basis.dimension(), &basis.wavenumbers(), 9);
        let b = random_seed(basis.dimension(), &basis.wavenumbers(), 9);
        assert_eq!(a, b);
        assert!((a.norm() - 1.0).abs() < 1e-14);
    }
}
