use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::eigs::{instability_eigs, max_real_part, EigenMode, Sector, EIGENVECTOR_THRESHOLD, GROWTH_THRESHOLD};
use crate::error::{Error, Result};
use crate::wave::WaveProfile;

/// κ-resolution of the band-edge bisection.
pub const BAND_EDGE_RESOLUTION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaRecord {
    pub kappa: f64,
    /// 2π/κ, the transverse period a torus would need to carry this mode.
    pub transverse_period: Option<f64>,
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub num_unstable_modes: usize,
    pub leading_lambda: Complex64,
    pub leading_mode: Option<EigenMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityScan {
    pub wave_id: String,
    pub sector: Sector,
    pub kappa_values: Vec<f64>,
    pub records: Vec<KappaRecord>,
    /// κ where max Re λ crosses the eigenvector threshold, ascending.
    pub band_edges: Vec<f64>,
    pub transversally_unstable: bool,
    pub max_growth_rate: f64,
    pub kappa_at_max_growth: f64,
}

impl StabilityScan {
    pub fn max_real_parts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.max_real_part).collect()
    }
}

fn linspace(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|j| {
            if j + 1 == steps {
                hi
            } else {
                lo + (hi - lo) * j as f64 / (steps - 1) as f64
            }
        })
        .collect()
}

fn record(wave: &WaveProfile, kappa: f64, sector: Sector) -> Result<KappaRecord> {
    let spec = instability_eigs(wave, kappa, sector)?;
    let leading_lambda = spec.eigenvalues[0];
    Ok(KappaRecord {
        kappa,
        transverse_period: (kappa > 0.0).then(|| 2.0 * std::f64::consts::PI / kappa),
        max_real_part: spec.max_real_part,
        num_unstable_modes: spec.num_unstable_modes,
        leading_lambda,
        leading_mode: spec.modes.into_iter().next(),
        eigenvalues: spec.eigenvalues,
    })
}

fn bisect_edge(wave: &WaveProfile, sector: Sector, mut lo: f64, mut hi: f64, lo_above: bool) -> Result<f64> {
    while hi - lo > BAND_EDGE_RESOLUTION {
        let mid = 0.5 * (lo + hi);
        let above = max_real_part(wave, mid, sector)? > EIGENVECTOR_THRESHOLD;
        if above == lo_above {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// max Re λ over a uniform κ grid, with band edges refined by bisection.
pub fn scan_kappa(
    wave: &WaveProfile,
    kappa_min: f64,
    kappa_max: f64,
    steps: usize,
    sector: Sector,
) -> Result<StabilityScan> {
    if !(kappa_min.is_finite() && kappa_max.is_finite() && 0.0 <= kappa_min && kappa_min < kappa_max) {
        return Err(Error::parameter(
            "instability_scanner",
            format!("need 0 <= kappa_min < kappa_max, got [{kappa_min}, {kappa_max}]"),
        ));
    }
    if steps < 2 {
        return Err(Error::parameter(
            "instability_scanner",
            format!("need at least 2 kappa steps, got {steps}"),
        ));
    }
    let kappa_values = linspace(kappa_min, kappa_max, steps);
    let records = kappa_values
        .par_iter()
        .map(|&k| record(wave, k, sector))
        .collect::<Result<Vec<_>>>()?;

    let brackets: Vec<(f64, f64, bool)> = records
        .windows(2)
        .filter_map(|w| {
            let a = w[0].max_real_part > EIGENVECTOR_THRESHOLD;
            let b = w[1].max_real_part > EIGENVECTOR_THRESHOLD;
            (a != b).then_some((w[0].kappa, w[1].kappa, a))
        })
        .collect();
    let band_edges = brackets
        .par_iter()
        .map(|&(lo, hi, lo_above)| bisect_edge(wave, sector, lo, hi, lo_above))
        .collect::<Result<Vec<_>>>()?;

    let (kappa_at_max_growth, max_growth_rate) = records
        .iter()
        .map(|r| (r.kappa, r.max_real_part))
        .fold((kappa_min, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    Ok(StabilityScan {
        wave_id: wave.id(),
        sector,
        kappa_values,
        transversally_unstable: records.iter().any(|r| r.max_real_part > GROWTH_THRESHOLD),
        records,
        band_edges,
        max_growth_rate,
        kappa_at_max_growth,
    })
}
