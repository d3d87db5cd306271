//! Variational functionals and the profile-equation residual.

use crate::spectral::RealField;

/// |u|^p evaluated pointwise, using integer powers where possible.
pub(crate) fn abs_pow(v: f64, power: f64) -> f64 {
    let rounded = power.round();
    if rounded == power && (0.0..=64.0).contains(&power) {
        v.abs().powi(rounded as i32)
    } else {
        v.abs().powf(power)
    }
}

/// |u|^α u; zero at u = 0 for every α > 0.
pub fn nonlinearity(u: &RealField, alpha: f64) -> RealField {
    u.map(u.parity(), |v| abs_pow(v, alpha) * v)
}

/// The potential |φ|^α (even whenever φ has a parity).
pub fn power_potential(u: &RealField, alpha: f64) -> RealField {
    use crate::spectral::Parity;
    let parity = match u.parity() {
        Parity::None => Parity::None,
        _ => Parity::Even,
    };
    u.map(parity, |v| abs_pow(v, alpha))
}

/// ∫₀^L |u|^{α+2} dx.
pub fn constraint_integral(u: &RealField, alpha: f64) -> f64 {
    let h = u.grid().spacing();
    h * u.values().iter().map(|&v| abs_pow(v, alpha + 2.0)).sum::<f64>()
}

/// −u'' + ωu, the L² gradient of B_ω.
pub(crate) fn b_gradient(u: &RealField, omega: f64) -> RealField {
    u.scale(omega).sub(&u.second_derivative())
}

/// B_ω(u) = ½ ∫ u_x² + ω u² dx, evaluated as ½⟨−u'' + ωu, u⟩ so that the
/// Nyquist mode is treated the same way as in the gradient.
pub fn functional_b(u: &RealField, omega: f64) -> f64 {
    0.5 * b_gradient(u, omega).inner(u)
}

/// Conserved quantities (E(u), F(u)) with
/// E = ½∫ u_x² − 2/(α+2) |u|^{α+2} and F = ½∫ u².
pub fn functionals_e_f(u: &RealField, alpha: f64) -> (f64, f64) {
    let kinetic = -u.second_derivative().inner(u);
    let potential = constraint_integral(u, alpha);
    let e = 0.5 * (kinetic - 2.0 / (alpha + 2.0) * potential);
    let f = 0.5 * u.inner(u);
    (e, f)
}

/// −u'' + ωu − c |u|^α u on the grid.
pub fn multiplier_residual_field(u: &RealField, alpha: f64, omega: f64, multiplier: f64) -> RealField {
    b_gradient(u, omega).axpy(-multiplier, &nonlinearity(u, alpha))
}

/// ‖−φ'' + ωφ − |φ|^α φ‖ in the discrete L² norm.
pub fn ode_residual(phi: &RealField, alpha: f64, omega: f64) -> f64 {
    multiplier_residual_field(phi, alpha, omega, 1.0).norm()
}

/// Residual of the multiplier form −u'' + ωu = c |u|^α u.
pub fn multiplier_residual(u: &RealField, alpha: f64, omega: f64, multiplier: f64) -> f64 {
    multiplier_residual_field(u, alpha, omega, multiplier).norm()
}

/// Angle between the gradients of B_ω and of the constraint functional.
/// Zero at a constrained stationary point.
pub fn lagrange_angle(u: &RealField, alpha: f64, omega: f64) -> f64 {
    let gb = b_gradient(u, omega);
    let gp = nonlinearity(u, alpha);
    let (nb, np) = (gb.norm(), gp.norm());
    if nb == 0.0 || np == 0.0 {
        return 0.0;
    }
    let along = gb.inner(&gp) / (np * np);
    let perp = gb.axpy(-along, &gp).norm();
    perp.atan2(along.abs() * np)
}
