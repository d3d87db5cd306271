use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::operator::OperatorMatrix;
use crate::error::{Error, Result};

/// How many of the lowest eigenvectors a summary keeps.
pub const KEPT_EIGENVECTORS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub operator: String,
    pub wave_id: String,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub n_negative: usize,
    pub kernel_dimension: usize,
    pub zero_tolerance: f64,
    /// Set when halving or doubling the tolerance changes either count.
    pub ambiguous: bool,
    /// Basis coefficients of the lowest eigenvectors, in eigenvalue order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lowest_eigenvectors: Vec<Vec<f64>>,
}

impl SpectrumSummary {
    pub fn counts(&self) -> (usize, usize) {
        (self.n_negative, self.kernel_dimension)
    }

    pub fn lowest(&self, k: usize) -> &[f64] {
        &self.eigenvalues[..k.min(self.eigenvalues.len())]
    }
}

/// 1e-6 · (1 + max |λ|).
pub fn default_zero_tolerance(eigenvalues: &[f64]) -> f64 {
    let largest = eigenvalues.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    1e-6 * (1.0 + largest)
}

/// (#{λ < −tol}, #{|λ| ≤ tol}).
pub fn count_at(eigenvalues: &[f64], tolerance: f64) -> (usize, usize) {
    let negative = eigenvalues.iter().filter(|&&v| v < -tolerance).count();
    let kernel = eigenvalues.iter().filter(|&&v| v.abs() <= tolerance).count();
    (negative, kernel)
}

/// Sorted eigenvalues and matching eigenvectors (as columns) of a symmetric
/// matrix.
fn sorted_eigen(op: &OperatorMatrix) -> (Vec<f64>, nalgebra::DMatrix<f64>) {
    let eig = SymmetricEigen::new(op.unshifted().clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i] + op.scalar_shift).collect();
    let vectors = eig.eigenvectors.select_columns(order.iter());
    (values, vectors)
}

/// Full symmetric eigendecomposition with negative and kernel counts.
/// `zero_tolerance = None` selects the default scale-aware tolerance.
pub fn spectrum(op: &OperatorMatrix, zero_tolerance: Option<f64>) -> Result<SpectrumSummary> {
    let scale = op.entries.amax().max(1.0);
    let asymmetry = op.asymmetry();
    if asymmetry > 1e-12 * scale {
        return Err(Error::Basis(format!(
            "operator {} is not symmetric (defect {asymmetry:.3e})",
            op.label
        )));
    }
    if let Some(tol) = zero_tolerance {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::parameter(
                "hill_spectra",
                format!("zero tolerance must be positive, got {tol}"),
            ));
        }
    }
    let (eigenvalues, vectors) = sorted_eigen(op);
    let tol = zero_tolerance.unwrap_or_else(|| default_zero_tolerance(&eigenvalues));
    let (n_negative, kernel_dimension) = count_at(&eigenvalues, tol);
    let ambiguous = count_at(&eigenvalues, 2.0 * tol) != (n_negative, kernel_dimension)
        || count_at(&eigenvalues, 0.5 * tol) != (n_negative, kernel_dimension);
    let kept = KEPT_EIGENVECTORS.min(eigenvalues.len());
    let lowest_eigenvectors = (0..kept)
        .map(|j| vectors.column(j).iter().copied().collect())
        .collect();
    Ok(SpectrumSummary {
        operator: op.label.to_string(),
        wave_id: op.wave_id.clone(),
        eigenvalues,
        n_negative,
        kernel_dimension,
        zero_tolerance: tol,
        ambiguous,
        lowest_eigenvectors,
    })
}
