//! Periodic standing waves by constrained minimization.
//!
//! A solve runs the projected descent in the requested parity sector,
//! rescales the Lagrange multiplier to one and polishes the profile equation
//! −φ'' + ωφ − |φ|^α φ = 0 with Newton's method.

mod functionals;
mod minimize;
mod newton;
mod params;
mod profile;
mod reduce;

pub use functionals::{
    constraint_integral, functional_b, functionals_e_f, lagrange_angle, multiplier_residual,
    multiplier_residual_field, nonlinearity, ode_residual, power_potential,
};
pub use minimize::{minimize_constrained, tau_for_amplitude};
pub use newton::{newton_refine, NEWTON_BASIN};
pub use params::{InitialGuess, Preconditioner, ProblemParams, SolverConfig};
pub use profile::{detect_fundamental_period, sign_changes, WaveDiagnostics, WaveProfile};
pub use reduce::{
    phase_reduce, phase_reduce_with_tolerance, rescale_profile, rescale_unit_multiplier,
    WRONSKIAN_TOLERANCE,
};

use crate::error::{Error, Result};

/// Minimize, rescale, refine and validate.
pub fn solve_wave(params: &ProblemParams, config: &SolverConfig) -> Result<WaveProfile> {
    let raw = minimize_constrained(params, config)?;
    let scaled = rescale_profile(&raw)?;
    let refined = newton_refine(&scaled, config)?;
    let violations = refined.acceptance_violations(config.newton_tolerance);
    if violations.is_empty() {
        Ok(refined)
    } else {
        Err(Error::WaveRejected(violations.join("; ")))
    }
}
