use nalgebra::{DVector, SymmetricEigen};

use super::functionals::{multiplier_residual_field, power_potential};
use super::params::SolverConfig;
use super::profile::WaveProfile;
use crate::error::{Error, Result};
use crate::spectral::ParityBasis;

/// Largest grid max-norm residual accepted as a Newton starting point.
pub const NEWTON_BASIN: f64 = 1e-2;
/// Relative size of the smallest Jacobian eigenvalue below which the
/// linearization is treated as singular.
const SINGULAR_RATIO: f64 = 1e-13;

/// Newton iteration on −φ'' + ωφ − c|φ|^α φ = 0 restricted to the parity
/// sector of the wave, with Jacobian −∂²_x + ω − c(α+1)|φ|^α assembled in
/// the matching cosine or sine basis.
pub fn newton_refine(wave: &WaveProfile, config: &SolverConfig) -> Result<WaveProfile> {
    let params = wave.params;
    let (alpha, omega, c) = (params.alpha, params.omega, wave.multiplier);
    let basis = ParityBasis::for_parity(params.parity, *wave.phi.grid());

    let mut phi = wave.phi.clone();
    let mut residual = multiplier_residual_field(&phi, alpha, omega, c);
    let mut norm = residual.norm();
    if norm <= config.newton_tolerance {
        return Ok(wave.clone());
    }
    if residual.max_abs() > NEWTON_BASIN {
        return Err(Error::NewtonBasin {
            residual: residual.max_abs(),
            limit: NEWTON_BASIN,
        });
    }
    let initial = norm;
    for step in 1..=config.newton_max_steps {
        let potential = power_potential(&phi, alpha).map(crate::spectral::Parity::Even, |q| {
            omega - c * (alpha + 1.0) * q
        });
        let jacobian = basis.hill_matrix(&potential)?;
        let eig = SymmetricEigen::new(jacobian.clone());
        let largest = eig.eigenvalues.amax();
        let smallest = eig.eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if smallest <= SINGULAR_RATIO * largest {
            return Err(Error::SingularJacobian { smallest });
        }
        let rhs: DVector<f64> = basis.project(&residual)?;
        let delta = eig.eigenvectors.transpose() * rhs;
        let delta = DVector::from_iterator(
            delta.len(),
            delta.iter().zip(eig.eigenvalues.iter()).map(|(d, l)| d / l),
        );
        let delta = &eig.eigenvectors * delta;
        phi = phi.sub(&basis.synthesize(&delta)).project_parity(params.parity);
        residual = multiplier_residual_field(&phi, alpha, omega, c);
        norm = residual.norm();
        if !norm.is_finite() || norm > 1e3 * initial {
            return Err(Error::NewtonDivergence {
                steps: step,
                residual: norm,
            });
        }
        if norm <= config.newton_tolerance {
            return Ok(WaveProfile::from_field(params, phi, c));
        }
    }
    Err(Error::NewtonDivergence {
        steps: config.newton_max_steps,
        residual: norm,
    })
}
