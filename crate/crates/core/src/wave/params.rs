use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Parity, RealField};

/// One standing-wave problem: the nonlinearity power α, frequency ω,
/// period L, constraint level τ = ∫|u|^{α+2} and the parity sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub alpha: f64,
    pub omega: f64,
    pub period: f64,
    pub tau: f64,
    pub parity: Parity,
}

impl ProblemParams {
    pub fn new(alpha: f64, omega: f64, period: f64, tau: f64, parity: Parity) -> Result<Self> {
        let params = ProblemParams {
            alpha,
            omega,
            period,
            tau,
            parity,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::parameter(
                    "wave_solver",
                    format!("{name} must be positive, got {v}"),
                ))
            }
        };
        positive("alpha", self.alpha)?;
        positive("omega", self.omega)?;
        positive("period", self.period)?;
        positive("tau", self.tau)?;
        match self.parity {
            Parity::Even => Ok(()),
            Parity::Odd if is_even_integer(self.alpha) => Ok(()),
            Parity::Odd => Err(Error::parameter(
                "wave_solver",
                format!("odd parity requires even integer alpha, got {}", self.alpha),
            )),
            Parity::None => Err(Error::parameter(
                "wave_solver",
                "parity must be even or odd",
            )),
        }
    }

    pub fn with_tau(self, tau: f64) -> Self {
        ProblemParams { tau, ..self }
    }
}

pub(crate) fn is_even_integer(alpha: f64) -> bool {
    alpha > 0.0 && alpha.fract() == 0.0 && (alpha as u64).is_multiple_of(2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialGuess {
    /// a + b cos(2πx/L) with b = ratio · a, scaled onto the constraint.
    CosineSeed { ratio: f64 },
    /// b sin(2πx/L), scaled onto the constraint.
    SineSeed,
    /// The constant state on the constraint.
    Constant,
    UserSupplied { field: RealField },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preconditioner {
    /// Descent directions solve (−∂²_x + ω) d = raw gradient.
    SobolevH1,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Grid size N.
    pub modes: usize,
    pub max_outer_iterations: usize,
    /// Relative norm of the projected Sobolev gradient at which descent stops.
    pub gradient_tolerance: f64,
    /// Target discrete L² residual of the profile equation.
    pub newton_tolerance: f64,
    pub newton_max_steps: usize,
    pub initial_guess: InitialGuess,
    pub preconditioner: Preconditioner,
}

impl SolverConfig {
    /// Defaults with the seed matching the parity sector.
    pub fn for_parity(parity: Parity) -> Self {
        let initial_guess = match parity {
            Parity::Odd => InitialGuess::SineSeed,
            _ => InitialGuess::CosineSeed { ratio: 0.5 },
        };
        SolverConfig {
            initial_guess,
            ..SolverConfig::default()
        }
    }

    pub fn with_modes(self, modes: usize) -> Self {
        SolverConfig { modes, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |message: String| Err(Error::parameter("wave_solver", message));
        if self.max_outer_iterations == 0 || self.newton_max_steps == 0 {
            return bad("iteration caps must be positive".into());
        }
        if !(self.gradient_tolerance > 0.0 && self.newton_tolerance > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if let InitialGuess::CosineSeed { ratio } = self.initial_guess {
            if !(ratio > 0.0 && ratio.is_finite()) {
                return bad(format!("cosine seed ratio must be positive, got {ratio}"));
            }
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            modes: 128,
            max_outer_iterations: 100_000,
            gradient_tolerance: 1e-9,
            newton_tolerance: 1e-10,
            newton_max_steps: 40,
            initial_guess: InitialGuess::CosineSeed { ratio: 0.5 },
            preconditioner: Preconditioner::SobolevH1,
        }
    }
}
