//! The transverse eigenvalue problem S(κ)w = λJw, κ scans and the
//! structural hypotheses on S(κ).

mod eigs;
mod hypotheses;
mod scan;

pub use eigs::{
    block_matrix, instability_eigs, max_real_part, quadruple_symmetry_defect, ComplexField, EigenMode,
    InstabilitySpectrum, Sector, CONSISTENCY_COUNT, CONSISTENCY_TOLERANCE, EIGENVECTOR_THRESHOLD,
    GROWTH_THRESHOLD,
};
pub(crate) use eigs::{eigenvalues_of, inverse_iteration, BlockOperators};
pub use hypotheses::{
    verify_hypotheses, CoercivityAtLargeKappa, EssentialSpectrum, HypothesisReport, Monotonicity,
    NegativeEigenvalue, SelfAdjointness, DERIVATIVE_SAMPLES, K_MARGIN,
};
pub use scan::{scan_kappa, KappaRecord, StabilityScan, BAND_EDGE_RESOLUTION};
