use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hill::{build_hill, HillKind};
use crate::spectral::{BasisKind, ParityBasis, RealField};
use crate::wave::WaveProfile;

/// Re λ above which a mode counts as growing.
pub const GROWTH_THRESHOLD: f64 = 1e-6;
/// Re λ above which eigenvectors are computed.
pub const EIGENVECTOR_THRESHOLD: f64 = 1e-8;
/// Relative agreement required between λ² and the product eigenvalues.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-7;
/// Number of dominant eigenvalues cross-checked.
pub const CONSISTENCY_COUNT: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Full,
    Odd,
}

impl Sector {
    pub fn basis_kind(self) -> BasisKind {
        match self {
            Sector::Full => BasisKind::FullFourier,
            Sector::Odd => BasisKind::Sine,
        }
    }
}

impl std::fmt::Display for Sector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sector::Full => "full",
            Sector::Odd => "odd",
        })
    }
}

impl std::str::FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Sector::Full),
            "odd" => Ok(Sector::Odd),
            other => Err(Error::parameter(
                "instability_scanner",
                format!("unknown sector '{other}' (expected full or odd)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexField {
    pub re: RealField,
    pub im: RealField,
}

impl ComplexField {
    pub fn norm_squared(&self) -> f64 {
        let (a, b) = (self.re.norm(), self.im.norm());
        a * a + b * b
    }
}

/// An eigenpair of the linearized transverse problem
/// v₁' = (L₂ + κ²) v₂, v₂' = −(L₁ + κ²) v₁.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenMode {
    pub lambda: Complex64,
    pub v1: ComplexField,
    pub v2: ComplexField,
    /// ‖Mw − λw‖ for the normalized coefficient vector w.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstabilitySpectrum {
    pub kappa: f64,
    pub sector: Sector,
    /// Sorted by decreasing real part, then decreasing imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub num_unstable_modes: usize,
    /// Largest relative λ² mismatch over the dominant eigenvalues.
    pub consistency_mismatch: f64,
    /// Modes with Re λ above the eigenvector threshold, leading first.
    pub modes: Vec<EigenMode>,
}

impl InstabilitySpectrum {
    pub fn leading(&self) -> Option<&EigenMode> {
        self.modes.first()
    }
}

/// The two blocks A₂ = L₂ + κ² and A₁ = L₁ + κ² in the sector basis.
pub(crate) struct BlockOperators {
    pub basis: ParityBasis,
    pub a1: DMatrix<f64>,
    pub a2: DMatrix<f64>,
}

impl BlockOperators {
    pub fn new(wave: &WaveProfile, kappa: f64, sector: Sector) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::parameter(
                "instability_scanner",
                format!("kappa must be nonnegative, got {kappa}"),
            ));
        }
        let basis = ParityBasis::new(sector.basis_kind(), *wave.phi.grid());
        let m = basis.dimension();
        let shift = DMatrix::<f64>::identity(m, m) * (kappa * kappa);
        let a1 = build_hill(wave, HillKind::L1, &basis)?.entries + &shift;
        let a2 = build_hill(wave, HillKind::L2, &basis)?.entries + &shift;
        Ok(BlockOperators { basis, a1, a2 })
    }

    /// [[0, A₂], [−A₁, 0]].
    pub fn block(&self) -> DMatrix<f64> {
        let m = self.a1.nrows();
        let mut out = DMatrix::zeros(2 * m, 2 * m);
        out.view_mut((0, m), (m, m)).copy_from(&self.a2);
        out.view_mut((m, 0), (m, m)).copy_from(&(-&self.a1));
        out
    }
}

/// The real block matrix [[0, L₂+κ²], [−(L₁+κ²), 0]] and its basis.
pub fn block_matrix(wave: &WaveProfile, kappa: f64, sector: Sector) -> Result<(ParityBasis, DMatrix<f64>)> {
    let ops = BlockOperators::new(wave, kappa, sector)?;
    let block = ops.block();
    Ok((ops.basis, block))
}

fn sort_eigenvalues(values: &mut [Complex64]) {
    values.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

pub(crate) fn eigenvalues_of(matrix: DMatrix<f64>) -> Vec<Complex64> {
    let mut values: Vec<Complex64> = matrix.complex_eigenvalues().iter().copied().collect();
    sort_eigenvalues(&mut values);
    values
}

pub(crate) fn max_real(values: &[Complex64]) -> f64 {
    values.iter().fold(f64::NEG_INFINITY, |m, v| m.max(v.re))
}

/// Largest relative distance between each of the dominant eigenvalues μ of
/// −A₂A₁ and the nearest λ² from the block solve.
fn product_mismatch(ops: &BlockOperators, block_values: &[Complex64]) -> f64 {
    let product = -(&ops.a2 * &ops.a1);
    let mut mu: Vec<Complex64> = product.complex_eigenvalues().iter().copied().collect();
    mu.sort_by(|a, b| b.norm().total_cmp(&a.norm()));
    let squares: Vec<Complex64> = block_values.iter().map(|l| l * l).collect();
    mu.iter()
        .take(CONSISTENCY_COUNT)
        .map(|m| {
            let nearest = squares.iter().fold(f64::INFINITY, |d, s| d.min((s - m).norm()));
            nearest / m.norm().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Eigenvector for a computed eigenvalue by inverse iteration on the
/// complexified matrix, normalized to unit length with its first
/// significant component real and positive.
pub(crate) fn inverse_iteration(matrix: &DMatrix<f64>, lambda: Complex64) -> (DVector<Complex64>, f64) {
    let n = matrix.nrows();
    let complex = matrix.map(|v| Complex64::new(v, 0.0));
    let mut offset = 1e-10 * (1.0 + lambda.norm());
    let mut x = DVector::from_fn(n, |j, _| Complex64::new(1.0 + j as f64 / n as f64, 0.0));
    for _ in 0..6 {
        let shifted = &complex - DMatrix::<Complex64>::identity(n, n) * (lambda + offset);
        let lu = shifted.lu();
        let mut ok = true;
        for _ in 0..3 {
            match lu.solve(&x) {
                Some(y) if y.iter().all(|c| c.re.is_finite() && c.im.is_finite()) => {
                    let norm = y.norm();
                    x = y / Complex64::new(norm, 0.0);
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            break;
        }
        offset *= 1e3;
    }
    let largest = x.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
    if let Some(pivot) = x.iter().find(|c| c.norm() > 1e-8 * largest).copied() {
        let phase = pivot.conj() / pivot.norm();
        x *= phase;
    }
    let residual = (&complex * &x - &x * lambda).norm();
    (x, residual)
}

fn to_fields(basis: &ParityBasis, coefficients: &[Complex64]) -> ComplexField {
    let re = DVector::from_iterator(coefficients.len(), coefficients.iter().map(|c| c.re));
    let im = DVector::from_iterator(coefficients.len(), coefficients.iter().map(|c| c.im));
    ComplexField {
        re: basis.synthesize(&re),
        im: basis.synthesize(&im),
    }
}

/// Eigenvalues of [[0, L₂+κ²], [−(L₁+κ²), 0]] in the requested sector, with
/// the λ² cross-check and eigenvectors of the growing modes.
pub fn instability_eigs(wave: &WaveProfile, kappa: f64, sector: Sector) -> Result<InstabilitySpectrum> {
    let ops = BlockOperators::new(wave, kappa, sector)?;
    let block = ops.block();
    let eigenvalues = eigenvalues_of(block.clone());
    let mismatch = product_mismatch(&ops, &eigenvalues);
    if !(mismatch <= CONSISTENCY_TOLERANCE) {
        return Err(Error::NumericalConsistency {
            mismatch,
            tolerance: CONSISTENCY_TOLERANCE,
        });
    }
    let m = ops.a1.nrows();
    let modes = eigenvalues
        .iter()
        .filter(|l| l.re > EIGENVECTOR_THRESHOLD)
        .map(|&lambda| {
            let (x, residual) = inverse_iteration(&block, lambda);
            let (v1, v2) = x.as_slice().split_at(m);
            EigenMode {
                lambda,
                v1: to_fields(&ops.basis, v1),
                v2: to_fields(&ops.basis, v2),
                residual,
            }
        })
        .collect();
    Ok(InstabilitySpectrum {
        kappa,
        sector,
        max_real_part: max_real(&eigenvalues),
        num_unstable_modes: eigenvalues.iter().filter(|l| l.re > GROWTH_THRESHOLD).count(),
        eigenvalues,
        consistency_mismatch: mismatch,
        modes,
    })
}

/// max Re λ at κ without eigenvectors or cross-check.
pub fn max_real_part(wave: &WaveProfile, kappa: f64, sector: Sector) -> Result<f64> {
    let ops = BlockOperators::new(wave, kappa, sector)?;
    Ok(max_real(&eigenvalues_of(ops.block())))
}

/// Largest distance from λ to the nearest of −λ and conj(λ) in the set.
pub fn quadruple_symmetry_defect(values: &[Complex64]) -> f64 {
    let nearest = |target: Complex64| values.iter().fold(f64::INFINITY, |d, v| d.min((v - target).norm()));
    values
        .iter()
        .map(|&l| nearest(-l).max(nearest(l.conj())))
        .fold(0.0, f64::max)
}
