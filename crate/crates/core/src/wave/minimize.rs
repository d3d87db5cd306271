//! Projected Sobolev-gradient descent for
//! min B_ω(u) subject to ∫|u|^{α+2} = τ within a parity sector.

use std::f64::consts::PI;

use super::functionals::{b_gradient, constraint_integral, functional_b, nonlinearity};
use super::params::{InitialGuess, Preconditioner, ProblemParams, SolverConfig};
use super::profile::WaveProfile;
use crate::error::{Error, Result};
use crate::spectral::{Parity, PeriodicGrid, RealField};

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-12;
/// Rounding slack allowed in the sufficient-decrease test.
const VALUE_SLACK: f64 = 1e-14;
/// Relative band in which the descent value counts as having reached the
/// constant state's value.
const CONSTANT_LEVEL: f64 = 1e-12;

fn grid_for(params: &ProblemParams, config: &SolverConfig) -> Result<PeriodicGrid> {
    PeriodicGrid::new(params.period, config.modes)
}

fn seed(params: &ProblemParams, grid: PeriodicGrid, guess: &InitialGuess) -> Result<RealField> {
    let k = 2.0 * PI / params.period;
    let mismatch = |what: &str| {
        Err(Error::parameter(
            "wave_solver",
            format!("{what} seed does not lie in the {} sector", params.parity),
        ))
    };
    match (guess, params.parity) {
        (InitialGuess::CosineSeed { ratio }, Parity::Even) => {
            RealField::from_fn(grid, Parity::Even, |x| 1.0 + ratio * (k * x).cos())
        }
        (InitialGuess::Constant, Parity::Even) => Ok(RealField::constant(grid, 1.0)),
        (InitialGuess::SineSeed, Parity::Odd) => {
            RealField::from_fn(grid, Parity::Odd, |x| (k * x).sin())
        }
        (InitialGuess::UserSupplied { field }, parity) => {
            if *field.grid() != grid {
                return Err(Error::parameter(
                    "wave_solver",
                    "user-supplied seed is not on the solver grid",
                ));
            }
            Ok(field.project_parity(parity))
        }
        (InitialGuess::CosineSeed { .. }, _) => mismatch("cosine"),
        (InitialGuess::Constant, _) => mismatch("constant"),
        (InitialGuess::SineSeed, _) => mismatch("sine"),
    }
}

/// Scales u onto the constraint surface ∫|u|^{α+2} = τ.
fn onto_constraint(u: &RealField, params: &ProblemParams) -> Result<RealField> {
    let p = constraint_integral(u, params.alpha);
    if !(p.is_finite() && p > f64::MIN_POSITIVE) || u.max_abs() == 0.0 {
        return Err(Error::DegenerateSolution);
    }
    Ok(u.scale((params.tau / p).powf(1.0 / (params.alpha + 2.0))))
}

/// The constant state on the constraint surface: c = (τ/L)^{1/(α+2)}.
fn constant_state(params: &ProblemParams, grid: PeriodicGrid) -> RealField {
    let c = (params.tau / params.period).powf(1.0 / (params.alpha + 2.0));
    RealField::constant(grid, c)
}

struct Direction {
    d: RealField,
    /// Squared metric norm of d.
    d_norm2: f64,
    /// Relative size ‖d‖ / ‖∇B‖ in the same metric.
    relative: f64,
}

fn projected_gradient(u: &RealField, params: &ProblemParams, pre: Preconditioner) -> Direction {
    let omega = params.omega;
    let p = nonlinearity(u, params.alpha).scale(params.alpha + 2.0);
    match pre {
        Preconditioner::SobolevH1 => {
            // In ⟨f, g⟩_ω = ⟨(−∂² + ω) f, g⟩ the gradient of B is u itself and
            // the gradient of the constraint is (−∂² + ω)⁻¹ p.
            let g = p.solve_helmholtz(omega);
            let mu = u.inner(&p) / p.inner(&g);
            let d = u.axpy(-mu, &g);
            let d_norm2 = b_gradient(&d, omega).inner(&d);
            let u_norm2 = b_gradient(u, omega).inner(u);
            Direction {
                relative: (d_norm2 / u_norm2).max(0.0).sqrt(),
                d,
                d_norm2,
            }
        }
        Preconditioner::None => {
            let gb = b_gradient(u, omega);
            let mu = gb.inner(&p) / p.inner(&p);
            let d = gb.axpy(-mu, &p);
            let d_norm2 = d.inner(&d);
            Direction {
                relative: (d_norm2 / gb.inner(&gb)).sqrt(),
                d,
                d_norm2,
            }
        }
    }
}

enum Outcome {
    Converged,
    Stalled,
    Exhausted,
}

/// Stationary point of B_ω on {∫|u|^{α+2} = τ} in the parity sector of
/// `params`. The returned profile carries its Lagrange multiplier
/// c₂ = 2B_ω(u)/τ and is not rescaled.
///
/// For even problems the constant state, itself an exact stationary point,
/// is returned when the descent cannot get below its value.
pub fn minimize_constrained(params: &ProblemParams, config: &SolverConfig) -> Result<WaveProfile> {
    params.validate()?;
    config.validate()?;
    let grid = grid_for(params, config)?;
    let mut u = onto_constraint(&seed(params, grid, &config.initial_guess)?, params)?;
    let mut value = functional_b(&u, params.omega);
    let constant = (params.parity == Parity::Even).then(|| {
        let c = constant_state(params, grid);
        let v = functional_b(&c, params.omega);
        (c, v)
    });
    let at_constant_level = |value: f64| match &constant {
        Some((_, vc)) => value <= vc * (1.0 + CONSTANT_LEVEL) && value >= vc * (1.0 - CONSTANT_LEVEL),
        None => false,
    };

    let mut step = 1.0_f64;
    let mut last_relative = f64::INFINITY;
    let mut outcome = Outcome::Exhausted;
    for _ in 0..config.max_outer_iterations {
        let dir = projected_gradient(&u, params, config.preconditioner);
        last_relative = dir.relative;
        if dir.relative <= config.gradient_tolerance {
            outcome = Outcome::Converged;
            break;
        }
        if at_constant_level(value) {
            outcome = Outcome::Converged;
            break;
        }
        step = (2.0 * step).min(1.0);
        let accepted = loop {
            // Rounding breaks the symmetry and the translation direction is
            // neutral, so the iterate is pinned to its sector at every step.
            let trial = u.axpy(-step, &dir.d).project_parity(params.parity);
            let candidate = onto_constraint(&trial, params)?;
            let cand_value = functional_b(&candidate, params.omega);
            if cand_value <= value - ARMIJO * step * dir.d_norm2 + VALUE_SLACK * value.abs() {
                break Some((candidate, cand_value));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((next, next_value)) => {
                u = next;
                value = next_value;
            }
            None => {
                outcome = Outcome::Stalled;
                break;
            }
        }
    }

    if let Some((c, vc)) = &constant {
        if value >= vc * (1.0 - CONSTANT_LEVEL) {
            u = c.clone();
            value = *vc;
            outcome = Outcome::Converged;
        }
    }
    if !matches!(outcome, Outcome::Converged) {
        return Err(Error::Convergence {
            iterations: config.max_outer_iterations,
            gradient_norm: last_relative,
            last_iterate: Box::new(u),
        });
    }
    if u.max_abs() == 0.0 {
        return Err(Error::DegenerateSolution);
    }
    let u = u.with_parity(params.parity)?;
    let multiplier = 2.0 * value / params.tau;
    Ok(WaveProfile::from_field(*params, u, multiplier))
}

/// Finds τ such that the constrained stationary point has max|u| = amplitude
/// (before multiplier rescaling), by bisection on log τ to within 1e-4.
pub fn tau_for_amplitude(
    params: &ProblemParams,
    config: &SolverConfig,
    amplitude: f64,
) -> Result<f64> {
    if !(amplitude.is_finite() && amplitude > 0.0) {
        return Err(Error::parameter(
            "wave_solver",
            format!("target amplitude must be positive, got {amplitude}"),
        ));
    }
    let first = minimize_constrained(params, config)?;
    let mut warm = config.clone();
    warm.initial_guess = InitialGuess::UserSupplied {
        field: first.phi.clone(),
    };
    let amplitude_at = |log_tau: f64, warm: &mut SolverConfig| -> Result<f64> {
        let wave = minimize_constrained(&params.with_tau(log_tau.exp()), warm)?;
        let a = wave.phi.max_abs();
        warm.initial_guess = InitialGuess::UserSupplied { field: wave.phi };
        Ok(a)
    };

    let mut lo = params.tau.ln();
    let mut a_lo = first.phi.max_abs();
    let mut hi = lo;
    let mut a_hi = a_lo;
    let factor = 4.0_f64.ln();
    let mut guard = 0;
    while !(a_lo <= amplitude && amplitude <= a_hi) {
        guard += 1;
        if guard > 200 {
            return Err(Error::parameter(
                "wave_solver",
                format!("could not bracket amplitude {amplitude}"),
            ));
        }
        if a_hi < amplitude {
            lo = hi;
            a_lo = a_hi;
            hi += factor;
            a_hi = amplitude_at(hi, &mut warm)?;
        } else {
            hi = lo;
            a_hi = a_lo;
            lo -= factor;
            a_lo = amplitude_at(lo, &mut warm)?;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let a = amplitude_at(mid, &mut warm)?;
        if (a - amplitude).abs() <= 1e-4 {
            return Ok(mid.exp());
        }
        if a < amplitude {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::parameter(
        "wave_solver",
        format!("amplitude bisection did not reach {amplitude}"),
    ))
}
