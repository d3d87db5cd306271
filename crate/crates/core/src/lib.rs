//! Periodic standing waves of the generalized nonlinear Schrödinger equation
//! `i u_t + Δu + |u|^α u = 0` on `𝕋_L × ℝ`, their Hill-operator spectra, and
//! the transverse instability problem `S(κ) w = λ J w`.
//!
//! The pipeline is: [`wave`] builds a real profile φ by constrained
//! minimization and Newton polishing, [`hill`] assembles and diagonalizes the
//! linearized operators, [`scanner`] solves the non-self-adjoint block
//! problem over a range of transverse wavenumbers and checks the structural
//! hypotheses, and [`dns`] integrates the linearized dynamics as an
//! independent cross-check. [`io`] holds the on-disk record formats.

pub mod dns;
pub mod error;
pub mod hill;
pub mod io;
pub mod scanner;
pub mod spectral;
pub mod wave;

pub use error::{Error, Result};
