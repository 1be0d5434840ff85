use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Grid, GridKind, Potential};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorLabel {
    Free,
    Perturbed,
}

/// Real symmetric tridiagonal discretization of `-Δ (+ V)`.
///
/// The three-point stencil keeps `H - H₀` exactly diagonal, so only the
/// diagonal and the (constant) off-diagonal are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    grid: Grid,
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
    label: OperatorLabel,
}

impl HamiltonianMatrix {
    /// Builds a matrix from raw tridiagonal bands, mostly for tests.
    pub fn from_bands(
        grid: Grid,
        diagonal: Vec<f64>,
        off_diagonal: Vec<f64>,
        label: OperatorLabel,
    ) -> Result<Self> {
        if diagonal.len() != grid.points() || off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidGrid(format!(
                "band lengths {}/{} do not match {} points",
                diagonal.len(),
                off_diagonal.len(),
                grid.points()
            )));
        }
        Ok(Self {
            grid,
            diagonal,
            off_diagonal,
            label,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn label(&self) -> OperatorLabel {
        self.label
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diagonal[i];
        }
        for (i, &e) in self.off_diagonal.iter().enumerate() {
            m[(i, i + 1)] = e;
            m[(i + 1, i)] = e;
        }
        m
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = self.diagonal.iter().zip(x).map(|(d, v)| d * v).collect();
        for i in 0..n - 1 {
            y[i] += self.off_diagonal[i] * x[i + 1];
            y[i + 1] += self.off_diagonal[i] * x[i];
        }
        y
    }

    /// Gershgorin bound on the spectral radius; used to scale tolerances.
    pub fn norm_bound(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off_diagonal[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off_diagonal[i].abs() } else { 0.0 };
                self.diagonal[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// Dirichlet three-point Laplacian, plus the centrifugal barrier on radial
/// grids.
pub fn build_free(grid: &Grid) -> HamiltonianMatrix {
    let h = grid.spacing();
    let kinetic = 1.0 / (h * h);
    let n = grid.points();
    let mut diagonal = vec![2.0 * kinetic; n];
    if let GridKind::Radial { angular_momentum } = grid.kind() {
        let l = angular_momentum as f64;
        let barrier = l * (l + 1.0);
        if barrier > 0.0 {
            for (i, d) in diagonal.iter_mut().enumerate() {
                let r = grid.node(i);
                *d += barrier / (r * r);
            }
        }
    }
    HamiltonianMatrix {
        grid: *grid,
        diagonal,
        off_diagonal: vec![-kinetic; n - 1],
        label: OperatorLabel::Free,
    }
}

pub fn build_perturbed(grid: &Grid, potential: &Potential) -> Result<HamiltonianMatrix> {
    potential.validate()?;
    if grid.kind() == GridKind::Line && !potential.is_even() {
        return Err(Error::InvalidPotential(format!(
            "line grids need an even potential (center {} ≠ 0)",
            potential.center
        )));
    }
    let mut h = build_free(grid);
    for (i, d) in h.diagonal.iter_mut().enumerate() {
        *d += potential.value(grid.node(i));
    }
    h.label = OperatorLabel::Perturbed;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_stencil() {
        let g = Grid::line(2.0, 3).unwrap();
        let h = build_free(&g).to_dense();
        let expected = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        assert_eq!(h, expected);
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn centrifugal_term() {
        let g = Grid::radial(4.0, 3, 1).unwrap();
        let h = build_free(&g);
        for (i, d) in h.diagonal().iter().enumerate() {
            let r = (i + 1) as f64;
            assert_eq!(*d, 2.0 + 2.0 / (r * r));
        }
    }

    #[test]
    fn zero_potential_matches_free() {
        let g = Grid::line(5.0, 40).unwrap();
        assert_eq!(
            build_perturbed(&g, &Potential::zero()).unwrap().to_dense(),
            build_free(&g).to_dense()
        );
    }

    #[test]
    fn square_well_shift() {
        let g = Grid::line(3.0, 59).unwrap();
        let free = build_free(&g);
        let h = build_perturbed(&g, &Potential::square_well(-2.0, 1.0)).unwrap();
        for i in 0..g.points() {
            let x = g.node(i);
            let shift = h.diagonal()[i] - free.diagonal()[i];
            if x.abs() < 1.0 - 1e-12 {
                assert_eq!(shift, -2.0);
            } else if x.abs() > 1.0 + 1e-12 {
                assert_eq!(shift, 0.0);
            }
        }
        assert_eq!(h.off_diagonal(), free.off_diagonal());
    }

    #[test]
    fn gaussian_minimum_diagonal() {
        let g = Grid::line(20.0, 2000).unwrap();
        let hh = g.spacing();
        let h = build_perturbed(&g, &Potential::gaussian(-1.0, 1.0)).unwrap();
        // Direct evaluation: nearest nodes to the origin sit at ±h/2.
        let x0 = hh / 2.0;
        let expected = 2.0 / (hh * hh) - (-x0 * x0).exp();
        let min = h.diagonal().iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((min - expected).abs() <= 1e-9 * expected.abs());
    }

    #[test]
    fn off_center_rejected_on_line() {
        let g = Grid::line(5.0, 20).unwrap();
        let v = Potential::gaussian(-1.0, 1.0).with_center(0.5);
        assert!(matches!(build_perturbed(&g, &v), Err(Error::InvalidPotential(_))));
    }
}
