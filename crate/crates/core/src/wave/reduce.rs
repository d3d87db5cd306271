use std::f64::consts::FRAC_PI_2;

use super::profile::WaveProfile;
use crate::error::{Error, Result};
use crate::spectral::RealField;

/// Default relative tolerance on the Wronskian −φ₁'φ₂ + φ₂'φ₁.
pub const WRONSKIAN_TOLERANCE: f64 = 1e-8;

/// Maps a solution of −u'' + ωu = c|u|^α u to c^{1/α} u, which solves the
/// equation with c = 1.
pub fn rescale_unit_multiplier(u: &RealField, multiplier: f64, alpha: f64) -> Result<RealField> {
    if !(multiplier.is_finite() && multiplier > 0.0) {
        return Err(Error::InvalidMultiplier(multiplier));
    }
    Ok(u.scale(multiplier.powf(1.0 / alpha)))
}

/// Rescales a profile to unit multiplier and refreshes its bookkeeping.
pub fn rescale_profile(wave: &WaveProfile) -> Result<WaveProfile> {
    let phi = rescale_unit_multiplier(&wave.phi, wave.multiplier, wave.params.alpha)?;
    Ok(WaveProfile::from_field(wave.params, phi, 1.0))
}

/// Reduces a complex stationary point Φ = φ₁ + iφ₂ with proportional
/// components to e^{iθ₀} φ with φ real. Returns (φ, θ₀).
pub fn phase_reduce(phi1: &RealField, phi2: &RealField) -> Result<(RealField, f64)> {
    phase_reduce_with_tolerance(phi1, phi2, WRONSKIAN_TOLERANCE)
}

pub fn phase_reduce_with_tolerance(
    phi1: &RealField,
    phi2: &RealField,
    tolerance: f64,
) -> Result<(RealField, f64)> {
    if phi1.grid() != phi2.grid() {
        return Err(Error::parameter(
            "wave_solver",
            "phase reduction needs both components on one grid",
        ));
    }
    let (d1, d2) = (phi1.derivative(), phi2.derivative());
    let wronskian = d2.mul(phi1).sub(&d1.mul(phi2));
    let scale = phi1.max_abs().max(phi2.max_abs()) * d1.max_abs().max(d2.max_abs());
    let defect = wronskian.max_abs();
    let allowed = tolerance * scale.max(f64::MIN_POSITIVE);
    if defect > allowed {
        return Err(Error::ReductionFailed {
            defect,
            tolerance: allowed,
        });
    }

    let (n1, n2) = (phi1.norm(), phi2.norm());
    if n2 <= 1e-14 * n1 {
        return Ok((phi1.clone(), 0.0));
    }
    // φ₁ = r φ₂, Φ = (r + i) φ₂ = e^{iθ₀} √(1 + r²) φ₂.
    let r = phi1.inner(phi2) / (n2 * n2);
    let theta = if r == 0.0 { FRAC_PI_2 } else { 1.0_f64.atan2(r) };
    Ok((phi2.scale((1.0 + r * r).sqrt()), theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_grid, Parity};
    use std::f64::consts::PI;

    fn profile() -> RealField {
        let g = build_grid(2.0 * PI, 32).unwrap();
        RealField::from_fn(g, Parity::Even, |x| 1.0 + 0.4 * x.cos()).unwrap()
    }

    #[test]
    fn rescale_identity_and_power() {
        let f = profile();
        assert_eq!(rescale_unit_multiplier(&f, 1.0, 2.0).unwrap(), f);
        let one = RealField::constant(*f.grid(), 1.0);
        let four = rescale_unit_multiplier(&one, 16.0, 2.0).unwrap();
        assert!(four.values().iter().all(|v| (v - 4.0).abs() < 1e-15));
        assert!(matches!(
            rescale_unit_multiplier(&f, 0.0, 2.0),
            Err(Error::InvalidMultiplier(_))
        ));
        assert!(rescale_unit_multiplier(&f, -1.0, 2.0).is_err());
    }

    #[test]
    fn purely_imaginary() {
        let f = profile();
        let zero = RealField::zeros(*f.grid(), Parity::Even);
        let (phi, theta) = phase_reduce(&zero, &f).unwrap();
        assert!((theta - PI / 2.0).abs() < 1e-15);
        assert!(phi.sub(&f).max_abs() < 1e-15);
    }

    #[test]
    fn purely_real() {
        let f = profile();
        let zero = RealField::zeros(*f.grid(), Parity::Even);
        let (phi, theta) = phase_reduce(&f, &zero).unwrap();
        assert_eq!(theta, 0.0);
        assert_eq!(phi, f);
    }

    #[test]
    fn proportional_pair() {
        let f = profile();
        let (phi, theta) = phase_reduce(&f.scale(3.0), &f.scale(4.0)).unwrap();
        assert!((theta - 1.0_f64.atan2(0.75)).abs() < 1e-15);
        assert!(phi.sub(&f.scale(5.0)).max_abs() < 1e-13);
    }

    #[test]
    fn non_proportional_pair_fails() {
        let f = profile();
        let g = RealField::from_fn(*f.grid(), Parity::Even, |x| (2.0 * x).cos()).unwrap();
        assert!(matches!(
            phase_reduce(&f, &g),
            Err(Error::ReductionFailed { .. })
        ));
    }
}
