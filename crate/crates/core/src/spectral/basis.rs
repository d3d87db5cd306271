use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::field::{Parity, RealField};
use super::grid::PeriodicGrid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    /// cos(ξ_n x), n = 0..=N/2; spans the even grid functions.
    Cosine,
    /// sin(ξ_n x), n = 1..N/2; spans the odd grid functions.
    Sine,
    /// Cosines followed by sines; spans everything.
    FullFourier,
}

impl BasisKind {
    pub fn parity(self) -> Parity {
        match self {
            BasisKind::Cosine => Parity::Even,
            BasisKind::Sine => Parity::Odd,
            BasisKind::FullFourier => Parity::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Trig {
    Cos,
    Sin,
}

/// Real trigonometric basis on a periodic grid, orthonormal with respect to
/// the discrete inner product h Σ_j f_j g_j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParityBasis {
    pub kind: BasisKind,
    pub grid: PeriodicGrid,
}

impl ParityBasis {
    pub fn new(kind: BasisKind, grid: PeriodicGrid) -> Self {
        ParityBasis { kind, grid }
    }

    /// Basis adapted to a field parity (full basis for untagged fields).
    pub fn for_parity(parity: Parity, grid: PeriodicGrid) -> Self {
        let kind = match parity {
            Parity::Even => BasisKind::Cosine,
            Parity::Odd => BasisKind::Sine,
            Parity::None => BasisKind::FullFourier,
        };
        ParityBasis { kind, grid }
    }

    fn functions(&self) -> Vec<(Trig, i64)> {
        let half = self.grid.len() as i64 / 2;
        let cosines = (0..=half).map(|n| (Trig::Cos, n));
        let sines = (1..half).map(|n| (Trig::Sin, n));
        match self.kind {
            BasisKind::Cosine => cosines.collect(),
            BasisKind::Sine => sines.collect(),
            BasisKind::FullFourier => cosines.chain(sines).collect(),
        }
    }

    pub fn dimension(&self) -> usize {
        let half = self.grid.len() / 2;
        match self.kind {
            BasisKind::Cosine => half + 1,
            BasisKind::Sine => half - 1,
            BasisKind::FullFourier => self.grid.len(),
        }
    }

    pub fn parity(&self) -> Parity {
        self.kind.parity()
    }

    /// Mode index n of every basis function, in column order.
    pub fn mode_indices(&self) -> Vec<i64> {
        self.functions().into_iter().map(|(_, n)| n).collect()
    }

    /// ξ_n of every basis function, in column order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        self.mode_indices()
            .into_iter()
            .map(|n| self.grid.wavenumber(n))
            .collect()
    }

    /// N × dim matrix whose columns are the sampled basis functions.
    pub fn matrix(&self) -> DMatrix<f64> {
        let grid = self.grid;
        let n = grid.len();
        let half = n as i64 / 2;
        let length = grid.period();
        let functions = self.functions();
        DMatrix::from_fn(n, functions.len(), |j, col| {
            let (trig, mode) = functions[col];
            let phase = grid.wavenumber(mode) * grid.node(j);
            match trig {
                Trig::Cos if mode == 0 || mode == half => phase.cos() / length.sqrt(),
                Trig::Cos => phase.cos() * (2.0 / length).sqrt(),
                Trig::Sin => phase.sin() * (2.0 / length).sqrt(),
            }
        })
    }

    fn check_grid(&self, field: &RealField) -> Result<()> {
        if *field.grid() != self.grid {
            return Err(Error::Basis(format!(
                "field grid ({} nodes, L = {}) differs from basis grid ({} nodes, L = {})",
                field.grid().len(),
                field.grid().period(),
                self.grid.len(),
                self.grid.period()
            )));
        }
        Ok(())
    }

    /// Coefficients c_k = h Σ_j b_k(x_j) f_j.
    pub fn project(&self, field: &RealField) -> Result<DVector<f64>> {
        self.check_grid(field)?;
        let values = DVector::from_column_slice(field.values());
        Ok(self.matrix().transpose() * values * self.grid.spacing())
    }

    /// Σ_k c_k b_k sampled on the grid, tagged with the basis parity.
    pub fn synthesize(&self, coefficients: &DVector<f64>) -> RealField {
        assert_eq!(coefficients.len(), self.dimension());
        let values = self.matrix() * coefficients;
        RealField::derived(self.grid, values.as_slice().to_vec(), self.parity())
    }

    /// h Bᵀ diag(q) B: multiplication by the grid function q in this basis.
    pub fn multiplication_matrix(&self, q: &[f64]) -> DMatrix<f64> {
        assert_eq!(q.len(), self.grid.len());
        let b = self.matrix();
        let h = self.grid.spacing();
        let mut weighted = b.clone();
        for (j, mut row) in weighted.row_iter_mut().enumerate() {
            row *= h * q[j];
        }
        b.transpose() * weighted
    }

    /// Galerkin matrix of −∂²_x + Q in this basis: diag(ξ_n²) plus the
    /// quadrature h Bᵀ diag(Q) B.
    pub fn hill_matrix(&self, potential: &RealField) -> Result<DMatrix<f64>> {
        self.check_grid(potential)?;
        let mut m = self.multiplication_matrix(potential.values());
        for (k, xi) in self.wavenumbers().into_iter().enumerate() {
            m[(k, k)] += xi * xi;
        }
        Ok(m)
    }
}

/// Physical-space matrix of ∂²_x on the grid (symmetric; Nyquist included).
pub fn second_derivative_matrix(grid: PeriodicGrid) -> DMatrix<f64> {
    let basis = ParityBasis::new(BasisKind::FullFourier, grid);
    let b = basis.matrix();
    let h = grid.spacing();
    let xi2 = DVector::from_iterator(
        basis.dimension(),
        basis.wavenumbers().into_iter().map(|xi| -xi * xi),
    );
    // B is orthogonal up to the quadrature weight: h Bᵀ B = I.
    &b * DMatrix::from_diagonal(&xi2) * b.transpose() * h
}
