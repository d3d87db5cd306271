#![allow(dead_code)]

use std::f64::consts::PI;

use transverse_core::spectral::{build_grid, Parity, RealField};
use transverse_core::wave::{solve_wave, ProblemParams, SolverConfig, WaveProfile};

pub const TWO_PI: f64 = 2.0 * PI;

pub fn constant_wave(alpha: f64, modes: usize) -> WaveProfile {
    let grid = build_grid(TWO_PI, modes).unwrap();
    let params = ProblemParams::new(alpha, 1.0, TWO_PI, TWO_PI, Parity::Even).unwrap();
    WaveProfile::from_field(params, RealField::constant(grid, 1.0), 1.0)
}

pub fn solve(alpha: f64, omega: f64, parity: Parity, modes: usize) -> WaveProfile {
    let params = ProblemParams::new(alpha, omega, TWO_PI, TWO_PI, parity).unwrap();
    solve_wave(&params, &SolverConfig::for_parity(parity).with_modes(modes)).unwrap()
}

/// Classical RK4 for φ'' = ωφ − |φ|^α φ written as a first-order system.
/// Returns (φ, φ') sampled every `per_sample` steps.
pub fn integrate_profile(
    alpha: f64,
    omega: f64,
    start: (f64, f64),
    dt: f64,
    steps: usize,
    per_sample: usize,
) -> Vec<(f64, f64)> {
    let f = |y: (f64, f64)| (y.1, omega * y.0 - y.0.abs().powf(alpha) * y.0);
    let mut y = start;
    let mut out = vec![y];
    for k in 1..=steps {
        let k1 = f(y);
        let k2 = f((y.0 + 0.5 * dt * k1.0, y.1 + 0.5 * dt * k1.1));
        let k3 = f((y.0 + 0.5 * dt * k2.0, y.1 + 0.5 * dt * k2.1));
        let k4 = f((y.0 + dt * k3.0, y.1 + dt * k3.1));
        y = (
            y.0 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            y.1 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        if k % per_sample == 0 {
            out.push(y);
        }
    }
    out
}

fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let g_lo = g(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (g_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

const SUBSTEPS: usize = 64;

/// Even positive wave of period L with its maximum at x = 0, by shooting on
/// the peak value a so that φ'(L/2) = 0 at the first minimum. Samples on an
/// N-point grid.
pub fn shoot_even(alpha: f64, omega: f64, period: f64, modes: usize) -> Vec<f64> {
    let dt = period / (modes * SUBSTEPS) as f64;
    let half_steps = modes / 2 * SUBSTEPS;
    let slope_at_half = |a: f64| {
        integrate_profile(alpha, omega, (a, 0.0), dt, half_steps, half_steps)
            .last()
            .unwrap()
            .1
    };
    let equilibrium = omega.powf(1.0 / alpha);
    let homoclinic = (omega * (alpha + 2.0) / 2.0).powf(1.0 / alpha);
    let a = bisect(equilibrium * (1.0 + 1e-6), homoclinic * (1.0 - 1e-12), slope_at_half);
    integrate_profile(alpha, omega, (a, 0.0), dt, modes * SUBSTEPS, SUBSTEPS)
        .into_iter()
        .take(modes)
        .map(|y| y.0)
        .collect()
}

/// Odd wave of period L with φ(0) = 0 and φ'(0) > 0, by shooting on the
/// slope so that φ'(L/4) = 0 at the first maximum.
pub fn shoot_odd(alpha: f64, omega: f64, period: f64, modes: usize) -> Vec<f64> {
    let dt = period / (modes * SUBSTEPS) as f64;
    let quarter_steps = modes / 4 * SUBSTEPS;
    let slope_at_quarter = |b: f64| {
        integrate_profile(alpha, omega, (0.0, b), dt, quarter_steps, quarter_steps)
            .last()
            .unwrap()
            .1
    };
    let mut lo = 1e-3;
    let mut hi = lo;
    while slope_at_quarter(hi) > 0.0 {
        lo = hi;
        hi *= 1.2;
    }
    let b = bisect(lo, hi, slope_at_quarter);
    integrate_profile(alpha, omega, (0.0, b), dt, modes * SUBSTEPS, SUBSTEPS)
        .into_iter()
        .take(modes)
        .map(|y| y.0)
        .collect()
}

/// Period of the positive orbit through (a, 0) with a above the
/// equilibrium: twice the time to the next turning point.
pub fn positive_orbit_period(alpha: f64, omega: f64, a: f64) -> f64 {
    let dt = 1e-4;
    let mut y = (a, 0.0);
    let mut t = 0.0;
    let f = |y: (f64, f64)| (y.1, omega * y.0 - y.0.abs().powf(alpha) * y.0);
    loop {
        let k1 = f(y);
        let k2 = f((y.0 + 0.5 * dt * k1.0, y.1 + 0.5 * dt * k1.1));
        let k3 = f((y.0 + 0.5 * dt * k2.0, y.1 + 0.5 * dt * k2.1));
        let k4 = f((y.0 + dt * k3.0, y.1 + dt * k3.1));
        let next = (
            y.0 + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            y.1 + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        );
        if t > 0.0 && next.1 >= 0.0 && y.1 < 0.0 {
            // Linear interpolation of the zero of φ'.
            let frac = -y.1 / (next.1 - y.1);
            return 2.0 * (t + frac * dt);
        }
        y = next;
        t += dt;
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
