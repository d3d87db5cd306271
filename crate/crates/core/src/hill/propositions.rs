use serde::{Deserialize, Serialize};

use super::operator::{apply_hill, build_block, build_hill, BlockKind, HillKind};
use super::spectrum::{spectrum, SpectrumSummary};
use crate::error::Result;
use crate::spectral::{BasisKind, Parity, ParityBasis};
use crate::wave::{newton_refine, SolverConfig, WaveProfile};

/// Relative residual allowed for the claimed kernel vectors.
pub const KERNEL_RESIDUAL_TOLERANCE: f64 = 1e-7;
/// Allowed change of each of the lowest eigenvalues when N doubles.
pub const GRID_DOUBLING_TOLERANCE: f64 = 1e-9;
/// Number of eigenvalues tracked under grid doubling.
pub const GRID_DOUBLING_COUNT: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

impl Check {
    fn count(name: &str, expected: usize, observed: usize) -> Check {
        Check {
            name: name.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            passed: expected == observed,
        }
    }

    fn at_most(name: &str, limit: f64, observed: f64) -> Check {
        Check {
            name: name.into(),
            expected: format!("<= {limit:.1e}"),
            observed: format!("{observed:.3e}"),
            passed: observed <= limit,
        }
    }

    fn at_least(name: &str, limit: f64, observed: f64) -> Check {
        Check {
            name: name.into(),
            expected: format!(">= {limit:.3e}"),
            observed: format!("{observed:.3e}"),
            passed: observed >= limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorCounts {
    pub operator: String,
    pub basis: BasisKind,
    pub n_negative: usize,
    pub kernel_dimension: usize,
    pub zero_tolerance: f64,
    pub ambiguous: bool,
    pub lowest: Vec<f64>,
}

impl OperatorCounts {
    fn from_summary(summary: &SpectrumSummary, basis: BasisKind) -> Self {
        OperatorCounts {
            operator: summary.operator.clone(),
            basis,
            n_negative: summary.n_negative,
            kernel_dimension: summary.kernel_dimension,
            zero_tolerance: summary.zero_tolerance,
            ambiguous: summary.ambiguous,
            lowest: summary.lowest(4).to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropositionReport {
    pub wave_id: String,
    pub parity: Parity,
    /// False when the wave is not of the kind the propositions describe
    /// (constant, sign-changing even, or odd with a non-even-integer α).
    pub within_hypotheses: bool,
    pub note: Option<String>,
    pub counts: Vec<OperatorCounts>,
    pub checks: Vec<Check>,
    /// Largest change of the lowest eigenvalues under N → 2N.
    pub grid_doubling_delta: Option<f64>,
}

impl PropositionReport {
    pub fn passed(&self) -> bool {
        self.within_hypotheses && self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn counts_for(&self, operator: &str, basis: BasisKind) -> Option<&OperatorCounts> {
        self.counts
            .iter()
            .find(|c| c.operator == operator && c.basis == basis)
    }
}

fn relative_residual(wave: &WaveProfile, which: HillKind, field: &crate::spectral::RealField) -> f64 {
    let residual = apply_hill(wave, which, field).norm();
    let norm = field.norm();
    if norm == 0.0 {
        residual
    } else {
        residual / norm
    }
}

/// The lowest `count` eigenvalues of 𝓛 in the given basis, on the wave's
/// grid and on the doubled grid. Returns the per-eigenvalue changes.
pub fn grid_doubling_deltas(wave: &WaveProfile, kind: BasisKind, count: usize) -> Result<Vec<f64>> {
    let coarse = build_block(wave, BlockKind::Lcal, 0.0, &ParityBasis::new(kind, *wave.phi.grid()))?;
    let coarse = spectrum(&coarse, None)?;

    let fine_phi = wave.phi.resample(2 * wave.modes())?;
    let fine = WaveProfile::from_field(wave.params, fine_phi, wave.multiplier);
    let fine = newton_refine(&fine, &SolverConfig::default().with_modes(fine.modes()))?;
    let fine_op = build_block(&fine, BlockKind::Lcal, 0.0, &ParityBasis::new(kind, *fine.phi.grid()))?;
    let fine = spectrum(&fine_op, None)?;

    Ok(coarse
        .lowest(count)
        .iter()
        .zip(fine.lowest(count))
        .map(|(a, b)| (a - b).abs())
        .collect())
}

/// Numerical check of the spectral structure of 𝓛 = diag(L₁, L₂) at the
/// wave: for even positive waves n(𝓛) = 1 and z(𝓛) = 2 with kernel
/// (φ', 0), (0, φ); for odd waves the odd-sector counts and the comparison
/// ordering of the lowest odd eigenvalues of L₁ and L₂.
pub fn check_propositions(wave: &WaveProfile) -> Result<PropositionReport> {
    let grid = *wave.phi.grid();
    let full = ParityBasis::new(BasisKind::FullFourier, grid);
    let mut counts = Vec::new();
    let mut checks = Vec::new();
    let diagnostics = wave.diagnostics();

    let l1_full = spectrum(&build_hill(wave, HillKind::L1, &full)?, None)?;
    counts.push(OperatorCounts::from_summary(&l1_full, BasisKind::FullFourier));
    let l2_full = spectrum(&build_hill(wave, HillKind::L2, &full)?, None)?;
    counts.push(OperatorCounts::from_summary(&l2_full, BasisKind::FullFourier));

    checks.push(Check::at_most(
        "L2 phi residual",
        KERNEL_RESIDUAL_TOLERANCE,
        relative_residual(wave, HillKind::L2, &wave.phi),
    ));

    let (within, note, doubling_kind) = match wave.params.parity {
        Parity::Odd => {
            let within = diagnostics.sign_changes > 0;
            let note = (!within).then(|| "odd wave without sign changes".to_string());

            checks.push(Check::count("n(L1) full", 2, l1_full.n_negative));

            let sine = ParityBasis::new(BasisKind::Sine, grid);
            let l1_odd = spectrum(&build_hill(wave, HillKind::L1, &sine)?, None)?;
            let l2_odd = spectrum(&build_hill(wave, HillKind::L2, &sine)?, None)?;
            let lcal_odd = spectrum(&build_block(wave, BlockKind::Lcal, 0.0, &sine)?, None)?;
            counts.push(OperatorCounts::from_summary(&l1_odd, BasisKind::Sine));
            counts.push(OperatorCounts::from_summary(&l2_odd, BasisKind::Sine));
            counts.push(OperatorCounts::from_summary(&lcal_odd, BasisKind::Sine));

            checks.push(Check::count("n(L1) odd", 1, l1_odd.n_negative));
            checks.push(Check::count("n(L2) odd", 0, l2_odd.n_negative));
            checks.push(Check::count("z(Lcal) odd", 1, lcal_odd.kernel_dimension));

            let margin = 10.0 * lcal_odd.zero_tolerance;
            let (a, b) = (&l1_odd.eigenvalues, &l2_odd.eigenvalues);
            checks.push(Check::at_least("lambda0(L2) - lambda0(L1) odd", margin, b[0] - a[0]));
            checks.push(Check::at_least("lambda1(L2) - lambda1(L1) odd", margin, b[1] - a[1]));
            (within, note, BasisKind::Sine)
        }
        _ => {
            let (within, note) = if wave.is_constant() {
                (false, Some("constant wave: the propositions need a non-constant wave of minimal period".to_string()))
            } else if diagnostics.min_value <= 0.0 {
                (false, Some("even wave is not positive".to_string()))
            } else {
                (true, None)
            };

            let lcal = spectrum(&build_block(wave, BlockKind::Lcal, 0.0, &full)?, None)?;
            counts.push(OperatorCounts::from_summary(&lcal, BasisKind::FullFourier));
            checks.push(Check::count("n(Lcal)", 1, lcal.n_negative));
            checks.push(Check::count("z(Lcal)", 2, lcal.kernel_dimension));
            if lcal.eigenvalues.len() > 1 {
                checks.push(Check::at_least(
                    "simple negative eigenvalue gap",
                    10.0 * lcal.zero_tolerance,
                    lcal.eigenvalues[1] - lcal.eigenvalues[0],
                ));
            }
            checks.push(Check::at_most(
                "L1 phi' residual",
                KERNEL_RESIDUAL_TOLERANCE,
                relative_residual(wave, HillKind::L1, &wave.phi.derivative()),
            ));

            let cosine = ParityBasis::new(BasisKind::Cosine, grid);
            let l1_even = spectrum(&build_hill(wave, HillKind::L1, &cosine)?, None)?;
            let l2_even = spectrum(&build_hill(wave, HillKind::L2, &cosine)?, None)?;
            counts.push(OperatorCounts::from_summary(&l1_even, BasisKind::Cosine));
            counts.push(OperatorCounts::from_summary(&l2_even, BasisKind::Cosine));
            checks.push(Check::count("n(L1) even", 1, l1_even.n_negative));
            checks.push(Check::count("n(L2) even", 0, l2_even.n_negative));
            (within, note, BasisKind::FullFourier)
        }
    };

    let deltas = grid_doubling_deltas(wave, doubling_kind, GRID_DOUBLING_COUNT)?;
    let delta = deltas.iter().fold(0.0_f64, |m, d| m.max(*d));
    checks.push(Check::at_most("grid doubling of lowest eigenvalues", GRID_DOUBLING_TOLERANCE, delta));

    Ok(PropositionReport {
        wave_id: wave.id(),
        parity: wave.params.parity,
        within_hypotheses: within,
        note,
        counts,
        checks,
        grid_doubling_delta: Some(delta),
    })
}
