use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest admissible number of grid nodes.
pub const MIN_MODES: usize = 8;

/// Uniform grid on the torus of length `period`, with `modes` nodes
/// x_j = j L / N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct PeriodicGrid {
    period: f64,
    modes: usize,
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    period: f64,
    modes: usize,
}

impl TryFrom<GridSpec> for PeriodicGrid {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        PeriodicGrid::new(spec.period, spec.modes)
    }
}

impl From<PeriodicGrid> for GridSpec {
    fn from(grid: PeriodicGrid) -> Self {
        GridSpec {
            period: grid.period,
            modes: grid.modes,
        }
    }
}

impl PeriodicGrid {
    pub fn new(period: f64, modes: usize) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::parameter(
                "spectral_core",
                format!("period must be positive, got {period}"),
            ));
        }
        if !modes.is_multiple_of(2) || modes < MIN_MODES {
            return Err(Error::parameter(
                "spectral_core",
                format!("mode count must be even and at least {MIN_MODES}, got {modes}"),
            ));
        }
        Ok(PeriodicGrid { period, modes })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// Number of nodes N.
    pub fn len(&self) -> usize {
        self.modes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.modes as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.modes).map(|j| self.node(j)).collect()
    }

    /// Fundamental wavenumber 2π/L.
    pub fn base_wavenumber(&self) -> f64 {
        2.0 * PI / self.period
    }

    /// Signed mode index of FFT slot `k` (0, 1, …, N/2, −N/2+1, …, −1).
    /// The Nyquist slot is reported as +N/2.
    pub fn signed_mode(&self, k: usize) -> i64 {
        let n = self.modes as i64;
        let k = k as i64;
        if k <= n / 2 {
            k
        } else {
            k - n
        }
    }

    /// ξ_n = 2πn/L.
    pub fn wavenumber(&self, mode: i64) -> f64 {
        mode as f64 * self.base_wavenumber()
    }

    /// Largest resolved |ξ|.
    pub fn max_wavenumber(&self) -> f64 {
        self.wavenumber(self.modes as i64 / 2)
    }

    /// Index of the node mirrored through x = 0.
    pub fn mirror(&self, j: usize) -> usize {
        (self.modes - j) % self.modes
    }

    /// The same period resolved with a different number of nodes.
    pub fn with_modes(&self, modes: usize) -> Result<Self> {
        PeriodicGrid::new(self.period, modes)
    }
}

/// Builds a grid, validating `L > 0`, `N` even and `N ≥ 8`.
pub fn build_grid(period: f64, modes: usize) -> Result<PeriodicGrid> {
    PeriodicGrid::new(period, modes)
}
