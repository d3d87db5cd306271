use crate::spectral::RealField;

/// Errors raised by the numerical pipeline. Messages are tagged with the
/// module that produced them.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{module}: invalid parameter: {message}")]
    Parameter {
        module: &'static str,
        message: String,
    },

    #[error("wave_solver: no convergence after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    Convergence {
        iterations: usize,
        gradient_norm: f64,
        last_iterate: Box<RealField>,
    },

    #[error("wave_solver: iterate collapsed to the zero field")]
    DegenerateSolution,

    #[error("wave_solver: Lagrange multiplier must be positive, got {0}")]
    InvalidMultiplier(f64),

    #[error("wave_solver: phase reduction failed, Wronskian defect {defect:.3e} exceeds {tolerance:.3e}")]
    ReductionFailed { defect: f64, tolerance: f64 },

    #[error("wave_solver: seed residual {residual:.3e} is outside the Newton basin (max {limit:.1e})")]
    NewtonBasin { residual: f64, limit: f64 },

    #[error("wave_solver: singular Newton Jacobian (smallest |eigenvalue| {smallest:.3e})")]
    SingularJacobian { smallest: f64 },

    #[error("wave_solver: Newton iteration diverged after {steps} steps (residual {residual:.3e})")]
    NewtonDivergence { steps: usize, residual: f64 },

    #[error("wave_solver: wave rejected: {0}")]
    WaveRejected(String),

    #[error("hill_spectra: basis error: {0}")]
    Basis(String),

    #[error("instability_scanner: block/product eigenvalue mismatch {mismatch:.3e} exceeds {tolerance:.1e}")]
    NumericalConsistency { mismatch: f64, tolerance: f64 },

    #[error("dns_validator: time-step instability at t = {time:.4} (growth factor {growth:.3e}); reduce dt")]
    Integrator { time: f64, growth: f64 },

    #[error("cli_io: unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("cli_io: record type mismatch: expected {expected}, found {found}")]
    RecordType { expected: String, found: String },

    #[error("cli_io: parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("cli_io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parameter(module: &'static str, message: impl Into<String>) -> Self {
        Error::Parameter {
            module,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
