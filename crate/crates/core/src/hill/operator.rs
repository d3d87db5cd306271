use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{BasisKind, Parity, ParityBasis, RealField};
use crate::wave::{power_potential, WaveProfile};

/// Which scalar Hill operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HillKind {
    /// L₁ = −∂²_x + ω − (α+1)|φ|^α
    L1,
    /// L₂ = −∂²_x + ω − |φ|^α
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// diag(L₁, L₂)
    Lcal,
    /// diag(L₂ + κ², L₁ + κ²)
    SKappa,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OperatorLabel {
    L1,
    L2,
    Lcal,
    SKappa { kappa: f64 },
    Custom { name: String },
}

impl std::fmt::Display for OperatorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OperatorLabel::L1 => f.write_str("L1"),
            OperatorLabel::L2 => f.write_str("L2"),
            OperatorLabel::Lcal => f.write_str("Lcal"),
            OperatorLabel::SKappa { kappa } => write!(f, "S(kappa={kappa})"),
            OperatorLabel::Custom { name } => f.write_str(name),
        }
    }
}

/// Dense self-adjoint discretization of a Hill operator (one block) or a
/// diagonal block operator (two blocks) in a trigonometric basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub basis: ParityBasis,
    pub entries: DMatrix<f64>,
    pub label: OperatorLabel,
    pub wave_id: String,
    /// 1 for scalar operators, 2 for block operators on pairs of fields.
    pub blocks: usize,
    /// s in `entries = base + s·Id`. The spectrum is taken from `base` and
    /// shifted by s, so shifted operators have exactly shifted spectra.
    pub scalar_shift: f64,
    pub base: Option<DMatrix<f64>>,
}

impl OperatorMatrix {
    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    /// max |M − Mᵀ|.
    pub fn asymmetry(&self) -> f64 {
        (&self.entries - self.entries.transpose()).amax()
    }

    /// Adds s·Id.
    pub fn shifted(&self, shift: f64, label: OperatorLabel) -> OperatorMatrix {
        let n = self.dimension();
        OperatorMatrix {
            entries: &self.entries + DMatrix::<f64>::identity(n, n) * shift,
            label,
            scalar_shift: self.scalar_shift + shift,
            base: Some(self.unshifted().clone()),
            ..self.clone()
        }
    }

    /// The matrix without its scalar shift.
    pub fn unshifted(&self) -> &DMatrix<f64> {
        self.base.as_ref().unwrap_or(&self.entries)
    }

    pub fn apply(&self, coefficients: &DVector<f64>) -> DVector<f64> {
        &self.entries * coefficients
    }
}

/// The potential Q(x) of L₁ or L₂ on the wave's grid.
pub fn hill_potential(wave: &WaveProfile, which: HillKind) -> RealField {
    let (alpha, omega) = (wave.params.alpha, wave.params.omega);
    let weight = match which {
        HillKind::L1 => alpha + 1.0,
        HillKind::L2 => 1.0,
    };
    let q = power_potential(&wave.phi, alpha);
    q.map(q.parity(), |v| omega - weight * v)
}

/// Applies L₁ or L₂ to a field on the wave's grid (pseudo-spectrally).
pub fn apply_hill(wave: &WaveProfile, which: HillKind, field: &RealField) -> RealField {
    let q = hill_potential(wave, which);
    q.mul(field).sub(&field.second_derivative())
}

fn check_basis(wave: &WaveProfile, basis: &ParityBasis, potential: &RealField) -> Result<()> {
    if basis.grid != *wave.phi.grid() {
        return Err(Error::Basis("basis grid differs from the wave grid".into()));
    }
    if basis.kind != BasisKind::FullFourier {
        let defect = potential.parity_defect(Parity::Even);
        if defect > 1e-10 * potential.max_abs() {
            return Err(Error::Basis(format!(
                "potential is not even (defect {defect:.3e}); the {:?} basis does not reduce the operator",
                basis.kind
            )));
        }
    }
    Ok(())
}

/// Galerkin matrix of L₁ or L₂ in the given basis.
pub fn build_hill(wave: &WaveProfile, which: HillKind, basis: &ParityBasis) -> Result<OperatorMatrix> {
    let potential = hill_potential(wave, which);
    check_basis(wave, basis, &potential)?;
    Ok(OperatorMatrix {
        basis: *basis,
        entries: basis.hill_matrix(&potential)?,
        label: match which {
            HillKind::L1 => OperatorLabel::L1,
            HillKind::L2 => OperatorLabel::L2,
        },
        wave_id: wave.id(),
        blocks: 1,
        scalar_shift: 0.0,
        base: None,
    })
}

fn block_diagonal(upper: &DMatrix<f64>, lower: &DMatrix<f64>) -> DMatrix<f64> {
    let (m, n) = (upper.nrows(), lower.nrows());
    let mut out = DMatrix::zeros(m + n, m + n);
    out.view_mut((0, 0), (m, m)).copy_from(upper);
    out.view_mut((m, m), (n, n)).copy_from(lower);
    out
}

/// 𝓛 = diag(L₁, L₂) or S(κ) = diag(L₂ + κ², L₁ + κ²) in the given basis.
pub fn build_block(
    wave: &WaveProfile,
    kind: BlockKind,
    kappa: f64,
    basis: &ParityBasis,
) -> Result<OperatorMatrix> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::parameter(
            "hill_spectra",
            format!("kappa must be nonnegative, got {kappa}"),
        ));
    }
    let l1 = build_hill(wave, HillKind::L1, basis)?;
    let l2 = build_hill(wave, HillKind::L2, basis)?;
    let unshifted = OperatorMatrix {
        basis: *basis,
        entries: DMatrix::zeros(0, 0),
        label: OperatorLabel::Lcal,
        wave_id: wave.id(),
        blocks: 2,
        scalar_shift: 0.0,
        base: None,
    };
    Ok(match kind {
        BlockKind::Lcal => OperatorMatrix {
            entries: block_diagonal(&l1.entries, &l2.entries),
            ..unshifted
        },
        BlockKind::SKappa => OperatorMatrix {
            entries: block_diagonal(&l2.entries, &l1.entries),
            ..unshifted
        }
        .shifted(kappa * kappa, OperatorLabel::SKappa { kappa }),
    })
}
