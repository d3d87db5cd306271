use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fft;
use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

/// Relative tolerance used when a parity tag is validated.
pub const PARITY_TOLERANCE: f64 = 1e-10;

/// Declared symmetry of a field about x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    /// Parity of the derivative of a field with this parity.
    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }

    fn combine(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::None
        }
    }
}

impl std::fmt::Display for Parity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::None => "none",
        };
        f.write_str(s)
    }
}

/// Real samples on a periodic grid with a declared parity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldSpec", into = "FieldSpec")]
pub struct RealField {
    grid: PeriodicGrid,
    values: Vec<f64>,
    parity: Parity,
}

#[derive(Serialize, Deserialize)]
struct FieldSpec {
    grid: PeriodicGrid,
    parity: Parity,
    values: Vec<f64>,
}

impl TryFrom<FieldSpec> for RealField {
    type Error = Error;

    fn try_from(spec: FieldSpec) -> Result<Self> {
        RealField::new(spec.grid, spec.values, spec.parity)
    }
}

impl From<RealField> for FieldSpec {
    fn from(field: RealField) -> Self {
        FieldSpec {
            grid: field.grid,
            parity: field.parity,
            values: field.values,
        }
    }
}

impl RealField {
    /// Builds a field and validates the parity tag to
    /// `PARITY_TOLERANCE · max|values|`.
    pub fn new(grid: PeriodicGrid, values: Vec<f64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::parameter(
                "spectral_core",
                format!(
                    "field has {} samples but the grid has {} nodes",
                    values.len(),
                    grid.len()
                ),
            ));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::parameter(
                "spectral_core",
                format!("non-finite sample {v}"),
            ));
        }
        let field = RealField {
            grid,
            values,
            parity,
        };
        let defect = field.parity_defect(parity);
        if defect > PARITY_TOLERANCE * field.max_abs() {
            return Err(Error::parameter(
                "spectral_core",
                format!("field is not {parity}: symmetry defect {defect:.3e}"),
            ));
        }
        Ok(field)
    }

    /// A field without a parity tag.
    pub fn untagged(grid: PeriodicGrid, values: Vec<f64>) -> Result<Self> {
        RealField::new(grid, values, Parity::None)
    }

    /// Samples `f` at the grid nodes.
    pub fn from_fn(grid: PeriodicGrid, parity: Parity, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().into_iter().map(f).collect();
        RealField::new(grid, values, parity)
    }

    pub fn zeros(grid: PeriodicGrid, parity: Parity) -> Self {
        RealField {
            grid,
            values: vec![0.0; grid.len()],
            parity,
        }
    }

    pub fn constant(grid: PeriodicGrid, value: f64) -> Self {
        RealField {
            grid,
            values: vec![value; grid.len()],
            parity: Parity::Even,
        }
    }

    /// Result of an operation that preserves the declared symmetry exactly
    /// in exact arithmetic; the tag is carried without revalidation.
    pub(crate) fn derived(grid: PeriodicGrid, values: Vec<f64>, parity: Parity) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        RealField {
            grid,
            values,
            parity,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Re-tags the field, validating the new parity.
    pub fn with_parity(self, parity: Parity) -> Result<Self> {
        RealField::new(self.grid, self.values, parity)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// max_j |u_j ∓ u_{−j}| for the requested symmetry.
    pub fn parity_defect(&self, parity: Parity) -> f64 {
        let sign = match parity {
            Parity::Even => -1.0,
            Parity::Odd => 1.0,
            Parity::None => return 0.0,
        };
        (0..self.values.len())
            .map(|j| (self.values[j] + sign * self.values[self.grid.mirror(j)]).abs())
            .fold(0.0, f64::max)
    }

    /// Rectangle rule h Σ_j u_j, spectrally accurate for smooth periodic data.
    pub fn integrate(&self) -> f64 {
        self.grid.spacing() * self.values.iter().sum::<f64>()
    }

    /// Discrete L² inner product h Σ_j u_j v_j.
    pub fn inner(&self, other: &RealField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        self.grid.spacing()
            * self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Fourier coefficients û(n) in FFT order.
    pub fn coefficients(&self) -> Vec<Complex64> {
        fft::forward(&self.values)
    }

    /// Applies a Fourier multiplier σ(n) where `n` is the signed mode index.
    /// The Nyquist coefficient is passed `n = N/2`.
    pub(crate) fn apply_multiplier(
        &self,
        parity: Parity,
        symbol: impl Fn(i64) -> Complex64,
    ) -> RealField {
        let mut coeffs = self.coefficients();
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c *= symbol(self.grid.signed_mode(k));
        }
        RealField::derived(self.grid, fft::inverse(&coeffs), parity)
    }

    /// Spectral second derivative: multiplies û(n) by −ξ_n², including the
    /// Nyquist mode.
    pub fn second_derivative(&self) -> RealField {
        let grid = self.grid;
        self.apply_multiplier(self.parity, |n| {
            let xi = grid.wavenumber(n);
            Complex64::new(-xi * xi, 0.0)
        })
    }

    /// Spectral first derivative; the Nyquist coefficient is dropped.
    pub fn derivative(&self) -> RealField {
        let grid = self.grid;
        let nyquist = grid.len() as i64 / 2;
        self.apply_multiplier(self.parity.flipped(), |n| {
            if n == nyquist {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, grid.wavenumber(n))
            }
        })
    }

    /// Solves (−∂²_x + shift) v = self for shift > 0.
    pub fn solve_helmholtz(&self, shift: f64) -> RealField {
        let grid = self.grid;
        self.apply_multiplier(self.parity, |n| {
            let xi = grid.wavenumber(n);
            Complex64::new(1.0 / (xi * xi + shift), 0.0)
        })
    }

    /// (f(x) ± f(−x)) / 2 tagged with the requested parity.
    pub fn project_parity(&self, parity: Parity) -> RealField {
        let sign = match parity {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
            Parity::None => return self.clone(),
        };
        let values = (0..self.values.len())
            .map(|j| 0.5 * (self.values[j] + sign * self.values[self.grid.mirror(j)]))
            .collect();
        RealField::derived(self.grid, values, parity)
    }

    pub fn map(&self, parity: Parity, f: impl Fn(f64) -> f64) -> RealField {
        RealField::derived(self.grid, self.values.iter().map(|&v| f(v)).collect(), parity)
    }

    pub fn scale(&self, factor: f64) -> RealField {
        self.map(self.parity, |v| factor * v)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &RealField) -> RealField {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let parity = match (self.parity, other.parity) {
            (Parity::None, _) | (_, Parity::None) => Parity::None,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        };
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        RealField::derived(self.grid, values, parity)
    }

    /// self + factor · other.
    pub fn axpy(&self, factor: f64, other: &RealField) -> RealField {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + factor * b)
            .collect();
        RealField::derived(self.grid, values, self.parity.combine(other.parity))
    }

    pub fn sub(&self, other: &RealField) -> RealField {
        self.axpy(-1.0, other)
    }

    pub fn add(&self, other: &RealField) -> RealField {
        self.axpy(1.0, other)
    }

    /// Trigonometric interpolation onto a grid with `modes` nodes. Exact for
    /// fields resolved on both grids.
    pub fn resample(&self, modes: usize) -> Result<RealField> {
        let target = self.grid.with_modes(modes)?;
        let n = self.grid.len();
        if modes == n {
            return Ok(self.clone());
        }
        let coeffs = self.coefficients();
        let mut out = vec![Complex64::new(0.0, 0.0); modes];
        let half_src = n as i64 / 2;
        let half_dst = modes as i64 / 2;
        let slot = |mode: i64, len: usize| -> usize { mode.rem_euclid(len as i64) as usize };
        for (k, &c) in coeffs.iter().enumerate() {
            let mode = self.grid.signed_mode(k);
            if modes > n {
                if mode == half_src {
                    // Split the Nyquist coefficient symmetrically between ±N/2.
                    out[slot(half_src, modes)] += 0.5 * c;
                    out[slot(-half_src, modes)] += 0.5 * c;
                } else {
                    out[slot(mode, modes)] += c;
                }
            } else if mode.abs() < half_dst {
                out[slot(mode, modes)] += c;
            } else if mode.abs() == half_dst {
                out[slot(half_dst, modes)] += c;
            }
        }
        Ok(RealField::derived(target, fft::inverse(&out), self.parity))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_grid;
    use std::f64::consts::PI;

    fn grid(n: usize) -> PeriodicGrid {
        build_grid(2.0 * PI, n).unwrap()
    }

    #[test]
    fn second_derivative_of_cosine() {
        let g = grid(16);
        let u = RealField::from_fn(g, Parity::Even, f64::cos).unwrap();
        let d2 = u.second_derivative();
        assert_eq!(d2.parity(), Parity::Even);
        for (x, v) in g.nodes().iter().zip(d2.values()) {
            assert!((v + x.cos()).abs() <= 1e-12);
        }
    }

    #[test]
    fn second_derivative_of_constant_vanishes() {
        let u = RealField::constant(grid(16), 3.5);
        assert!(u.second_derivative().max_abs() <= 1e-13);
    }

    #[test]
    fn second_derivative_of_sin3() {
        let g = grid(32);
        let u = RealField::from_fn(g, Parity::Odd, |x| (3.0 * x).sin()).unwrap();
        let d2 = u.second_derivative();
        assert_eq!(d2.parity(), Parity::Odd);
        for (x, v) in g.nodes().iter().zip(d2.values()) {
            assert!((v + 9.0 * (3.0 * x).sin()).abs() <= 1e-11);
        }
    }

    #[test]
    fn integrals() {
        let g = grid(16);
        assert!((RealField::constant(g, 1.0).integrate() - 2.0 * PI).abs() < 1e-14);
        let c = RealField::from_fn(g, Parity::Even, f64::cos).unwrap();
        assert!(c.integrate().abs() <= 1e-14);
        let c2 = RealField::from_fn(g, Parity::Even, |x| x.cos().powi(2)).unwrap();
        assert!((c2.integrate() - PI).abs() <= 1e-12);
    }

    #[test]
    fn parity_projection() {
        let g = grid(16);
        let u = RealField::from_fn(g, Parity::None, |x| x.cos() + x.sin()).unwrap();
        let even = u.project_parity(Parity::Even);
        let odd = u.project_parity(Parity::Odd);
        for (j, x) in g.nodes().iter().enumerate() {
            assert!((even.values()[j] - x.cos()).abs() < 1e-15);
            assert!((odd.values()[j] - x.sin()).abs() < 1e-15);
        }
        assert_eq!(even.parity(), Parity::Even);
        assert_eq!(odd.parity(), Parity::Odd);
        let again = even.project_parity(Parity::Even);
        for (a, b) in again.values().iter().zip(even.values()) {
            assert!((a - b).abs() <= 1e-16);
        }
    }

    #[test]
    fn parity_tag_is_validated() {
        let g = grid(16);
        assert!(RealField::from_fn(g, Parity::Even, f64::sin).is_err());
        assert!(RealField::from_fn(g, Parity::Odd, f64::cos).is_err());
        assert!(RealField::from_fn(g, Parity::Odd, f64::sin).is_ok());
        assert!(RealField::new(g, vec![1.0; 8], Parity::None).is_err());
    }

    #[test]
    fn derivative_flips_parity() {
        let g = grid(32);
        let u = RealField::from_fn(g, Parity::Even, |x| (2.0 * x).cos()).unwrap();
        let du = u.derivative();
        assert_eq!(du.parity(), Parity::Odd);
        for (x, v) in g.nodes().iter().zip(du.values()) {
            assert!((v + 2.0 * (2.0 * x).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn helmholtz_inverts_operator() {
        let g = grid(32);
        let f = RealField::from_fn(g, Parity::Even, |x| (x.cos()).exp()).unwrap();
        let v = f.solve_helmholtz(2.0);
        let back = v.scale(2.0).sub(&v.second_derivative());
        for (a, b) in back.values().iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn resample_is_exact_for_trig_polynomials() {
        let g = grid(16);
        let f = |x: f64| 1.0 + (3.0 * x).cos() - 0.5 * (7.0 * x).sin() + 0.25 * (8.0 * x).cos();
        let u = RealField::from_fn(g, Parity::None, f).unwrap();
        let fine = u.resample(32).unwrap();
        for (x, v) in fine.grid().nodes().iter().zip(fine.values()) {
            assert!((v - f(*x)).abs() < 1e-13, "{x} {v}");
        }
        let back = fine.resample(16).unwrap();
        for (a, b) in back.values().iter().zip(u.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }
}
