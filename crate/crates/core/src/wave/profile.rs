use serde::{Deserialize, Serialize};

use super::functionals::{constraint_integral, functional_b, multiplier_residual};
use super::params::ProblemParams;
use crate::spectral::{Parity, RealField};

/// Relative size below which a Fourier coefficient is treated as absent when
/// detecting the fundamental period.
const PERIOD_DETECTION_THRESHOLD: f64 = 1e-9;

/// A real periodic profile together with its problem data.
///
/// `phi` satisfies −φ'' + ωφ = c |φ|^α φ with c = `multiplier`; accepted
/// waves have c = 1, i.e. they solve the profile equation itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveProfile {
    pub params: ProblemParams,
    pub phi: RealField,
    pub multiplier: f64,
    pub ode_residual_norm: f64,
    /// B_ω(φ).
    pub functional_value: f64,
    /// ∫|φ|^{α+2} for the stored φ.
    pub constraint_value: f64,
    /// Smallest period L/m visible in the spectrum; `None` for a constant.
    pub fundamental_period: Option<f64>,
}

impl WaveProfile {
    /// Computes the derived metadata for a field satisfying the multiplier
    /// equation with the given c.
    pub fn from_field(params: ProblemParams, phi: RealField, multiplier: f64) -> Self {
        let ode_residual_norm = multiplier_residual(&phi, params.alpha, params.omega, multiplier);
        let functional_value = functional_b(&phi, params.omega);
        let constraint_value = constraint_integral(&phi, params.alpha);
        let fundamental_period = detect_fundamental_period(&phi);
        WaveProfile {
            params,
            phi,
            multiplier,
            ode_residual_norm,
            functional_value,
            constraint_value,
            fundamental_period,
        }
    }

    pub fn modes(&self) -> usize {
        self.phi.grid().len()
    }

    /// Short identifier used to tag operators built from this wave.
    pub fn id(&self) -> String {
        let p = &self.params;
        format!(
            "alpha={}_omega={}_L={}_{}_N={}",
            p.alpha,
            p.omega,
            p.period,
            p.parity,
            self.modes()
        )
    }

    /// True when φ is constant up to rounding.
    pub fn is_constant(&self) -> bool {
        let mean = self.phi.integrate() / self.params.period;
        let spread = self
            .phi
            .values()
            .iter()
            .fold(0.0_f64, |m, v| m.max((v - mean).abs()));
        spread <= 1e-12 * self.phi.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn diagnostics(&self) -> WaveDiagnostics {
        let phi = &self.phi;
        WaveDiagnostics {
            min_value: phi.min(),
            max_abs: phi.max_abs(),
            even_defect: phi.parity_defect(Parity::Even),
            odd_defect: phi.parity_defect(Parity::Odd),
            sign_changes: sign_changes(phi.values()),
            ode_residual: self.ode_residual_norm,
            constraint_defect: (self.constraint_value
                - constraint_integral(phi, self.params.alpha))
            .abs(),
        }
    }

    /// Invariants every accepted wave must satisfy; returns the violations.
    pub fn acceptance_violations(&self, newton_tolerance: f64) -> Vec<String> {
        let d = self.diagnostics();
        let mut out = Vec::new();
        if (self.multiplier - 1.0).abs() > 1e-14 {
            out.push(format!("multiplier {} is not rescaled to 1", self.multiplier));
        }
        if d.ode_residual > newton_tolerance {
            out.push(format!(
                "ODE residual {:.3e} above tolerance {:.3e}",
                d.ode_residual, newton_tolerance
            ));
        }
        if d.constraint_defect > 1e-10 * self.params.tau.max(self.constraint_value) {
            out.push(format!("constraint bookkeeping off by {:.3e}", d.constraint_defect));
        }
        if self.phi.parity() != self.params.parity {
            out.push(format!(
                "profile tagged {} but the problem is {}",
                self.phi.parity(),
                self.params.parity
            ));
        }
        match self.params.parity {
            Parity::Even => {
                if d.min_value <= 0.0 {
                    out.push(format!("even wave is not positive (min {:.3e})", d.min_value));
                }
                if d.even_defect > 1e-10 * d.max_abs {
                    out.push(format!("evenness defect {:.3e}", d.even_defect));
                }
            }
            Parity::Odd => {
                if d.odd_defect > 1e-10 * d.max_abs {
                    out.push(format!("oddness defect {:.3e}", d.odd_defect));
                }
                if d.sign_changes == 0 {
                    out.push("odd wave has no sign change".into());
                }
            }
            Parity::None => out.push("wave has no parity".into()),
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveDiagnostics {
    pub min_value: f64,
    pub max_abs: f64,
    /// max_j |φ(x_j) − φ(−x_j)|.
    pub even_defect: f64,
    /// max_j |φ(x_j) + φ(−x_j)|.
    pub odd_defect: f64,
    /// Sign changes per period, counting node zeros once.
    pub sign_changes: usize,
    pub ode_residual: f64,
    pub constraint_defect: f64,
}

/// Number of sign changes of periodic samples. Exact zeros are skipped so a
/// node zero between opposite signs counts once.
pub fn sign_changes(values: &[f64]) -> usize {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let signs: Vec<bool> = values
        .iter()
        .filter(|v| v.abs() > 1e-12 * scale)
        .map(|&v| v > 0.0)
        .collect();
    if signs.is_empty() {
        return 0;
    }
    (0..signs.len())
        .filter(|&i| signs[i] != signs[(i + 1) % signs.len()])
        .count()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn detect_fundamental_period(phi: &RealField) -> Option<f64> {
    let coeffs = phi.coefficients();
    let grid = phi.grid();
    let threshold = PERIOD_DETECTION_THRESHOLD * phi.max_abs();
    let g = (1..=grid.len() / 2)
        .filter(|&n| coeffs[n].norm() > threshold)
        .fold(0_u64, |g, n| gcd(g, n as u64));
    (g > 0).then(|| grid.period() / g as f64)
}
