//! Thin wrapper around `rustfft` for real periodic samples.
//!
//! Coefficients use the normalization û(n) = (1/N) Σ_j u_j e^{-iξ_n x_j},
//! so that u_j = Σ_n û(n) e^{iξ_n x_j} and Parseval reads
//! h Σ_j u_j² = L Σ_n |û(n)|².

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub fn forward(values: &[f64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buffer: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n));
    plan.process(&mut buffer);
    let scale = 1.0 / n as f64;
    buffer.iter_mut().for_each(|c| *c *= scale);
    buffer
}

/// Inverse transform, keeping the real part.
pub fn inverse(coefficients: &[Complex64]) -> Vec<f64> {
    let n = coefficients.len();
    let mut buffer = coefficients.to_vec();
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    plan.process(&mut buffer);
    buffer.iter().map(|c| c.re).collect()
}
