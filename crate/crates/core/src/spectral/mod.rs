//! Fourier discretization on the L-torus: grids, spectral differentiation,
//! periodic quadrature and parity-adapted trigonometric bases.

mod basis;
pub(crate) mod fft;
mod field;
mod grid;

pub use basis::{second_derivative_matrix, BasisKind, ParityBasis};
pub use field::{Parity, RealField, PARITY_TOLERANCE};
pub use grid::{build_grid, PeriodicGrid, MIN_MODES};

/// Spectrally exact second derivative; keeps the parity tag.
pub fn second_derivative(field: &RealField) -> RealField {
    field.second_derivative()
}

/// Periodic rectangle rule.
pub fn integrate(field: &RealField) -> f64 {
    field.integrate()
}

/// (f(x) ± f(−x)) / 2.
pub fn project_parity(field: &RealField, parity: Parity) -> RealField {
    field.project_parity(parity)
}
