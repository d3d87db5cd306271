//! Hill operators L₁, L₂ at a standing wave, the block operators 𝓛 and
//! S(κ), their spectra and the spectral structure checks.

mod operator;
mod propositions;
mod spectrum;

pub use operator::{
    apply_hill, build_block, build_hill, hill_potential, BlockKind, HillKind, OperatorLabel,
    OperatorMatrix,
};
pub use propositions::{
    check_propositions, grid_doubling_deltas, Check, OperatorCounts, PropositionReport,
    GRID_DOUBLING_COUNT, GRID_DOUBLING_TOLERANCE, KERNEL_RESIDUAL_TOLERANCE,
};
pub use spectrum::{count_at, default_zero_tolerance, spectrum, SpectrumSummary, KEPT_EIGENVECTORS};
