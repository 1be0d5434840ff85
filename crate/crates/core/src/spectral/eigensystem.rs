use nalgebra::DMatrix;

use super::tridiagonal;
use crate::error::{Error, Result};
use crate::operators::{Grid, HamiltonianMatrix, OperatorLabel};

/// Ascending spectrum of a [`HamiltonianMatrix`] with eigenvectors for the
/// lowest `vectors.ncols()` eigenvalues (possibly none, possibly all).
#[derive(Debug, Clone)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
    label: OperatorLabel,
    grid: Grid,
    norm: f64,
}

impl EigenSystem {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Eigenvectors for the lowest [`Self::vector_count`] eigenvalues.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    pub fn vector_count(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn label(&self) -> OperatorLabel {
        self.label
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Spectral radius bound of the source matrix.
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// `#{λ_j ≤ energy}`.
    pub fn count_below(&self, energy: f64) -> usize {
        self.values.partition_point(|&v| v <= energy)
    }

    /// Distance from `energy` to the nearest eigenvalue.
    pub fn distance_to_spectrum(&self, energy: f64) -> f64 {
        let i = self.values.partition_point(|&v| v < energy);
        let mut d = f64::INFINITY;
        if i < self.values.len() {
            d = d.min((self.values[i] - energy).abs());
        }
        if i > 0 {
            d = d.min((energy - self.values[i - 1]).abs());
        }
        d
    }

    /// Largest residual `‖H v_j − λ_j v_j‖` over the stored eigenvectors.
    pub fn max_residual(&self, h: &HamiltonianMatrix) -> f64 {
        (0..self.vector_count())
            .map(|j| {
                let v: Vec<f64> = self.vectors.column(j).iter().copied().collect();
                let hv = h.apply(&v);
                hv.iter()
                    .zip(&v)
                    .map(|(a, b)| (a - self.values[j] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }
}

fn build(h: &HamiltonianMatrix, values: Vec<f64>, vectors: DMatrix<f64>) -> Result<EigenSystem> {
    let sys = EigenSystem {
        values,
        vectors,
        label: h.label(),
        grid: *h.grid(),
        norm: h.norm_bound(),
    };
    let residual = sys.max_residual(h);
    if residual > 1e-8 * sys.norm.max(1.0) || !residual.is_finite() {
        return Err(Error::SolverFailure { residual });
    }
    Ok(sys)
}

/// Full eigendecomposition with every eigenvector. `O(N³)`; meant for grids
/// of at most a few thousand points.
pub fn eigendecompose(h: &HamiltonianMatrix) -> Result<EigenSystem> {
    let (values, vectors) = tridiagonal::eigenpairs(h.diagonal(), h.off_diagonal())?;
    build(h, values, vectors)
}

/// Eigenvalues only.
pub fn eigenvalues_only(h: &HamiltonianMatrix) -> Result<EigenSystem> {
    let values = tridiagonal::eigenvalues(h.diagonal(), h.off_diagonal())?;
    build(h, values, DMatrix::zeros(h.dim(), 0))
}

/// All eigenvalues, plus eigenvectors for every eigenvalue `≤ energy`.
pub fn eigendecompose_below(h: &HamiltonianMatrix, energy: f64) -> Result<EigenSystem> {
    let values = tridiagonal::eigenvalues(h.diagonal(), h.off_diagonal())?;
    let count = values.partition_point(|&v| v <= energy);
    let vectors =
        tridiagonal::inverse_iteration(h.diagonal(), h.off_diagonal(), &values[..count], h.norm_bound());
    build(h, values, vectors)
}

/// `#{λ_j(H) ≤ λ} − #{λ_j(H₀) ≤ λ}`, exact for finite matrices.
pub fn counting_difference(eig_h: &EigenSystem, eig_h0: &EigenSystem, energy: f64) -> Result<i64> {
    let guard = 1e-12 * eig_h.norm().max(eig_h0.norm()).max(1.0);
    if eig_h.distance_to_spectrum(energy) <= guard || eig_h0.distance_to_spectrum(energy) <= guard {
        return Err(Error::DegenerateEnergy { energy, guard });
    }
    Ok(eig_h.count_below(energy) as i64 - eig_h0.count_below(energy) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_free, build_perturbed, Potential};

    #[test]
    fn three_by_three_free_spectrum() {
        let g = Grid::line(2.0, 3).unwrap();
        let sys = eigendecompose(&build_free(&g)).unwrap();
        let s = 2f64.sqrt();
        for (v, e) in sys.values().iter().zip([2.0 - s, 2.0, 2.0 + s]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_matrix() {
        let g = Grid::line(1.0, 4).unwrap();
        let h = HamiltonianMatrix::from_bands(g, vec![0.0; 4], vec![0.0; 3], OperatorLabel::Free).unwrap();
        let sys = eigendecompose(&h).unwrap();
        assert!(sys.values().iter().all(|&v| v == 0.0));
        assert_eq!(sys.vectors(), &DMatrix::<f64>::identity(4, 4));
    }

    #[test]
    fn square_well_binds() {
        let g = Grid::line(20.0, 2000).unwrap();
        let h = build_perturbed(&g, &Potential::square_well(-2.0, 1.0)).unwrap();
        let sys = eigenvalues_only(&h).unwrap();
        assert!(sys.min() < 0.0);
    }

    #[test]
    fn counting_difference_cases() {
        let g = Grid::line(20.0, 400).unwrap();
        let h0 = eigenvalues_only(&build_free(&g)).unwrap();
        let h = eigenvalues_only(&build_perturbed(&g, &Potential::square_well(-2.0, 1.0)).unwrap()).unwrap();
        assert_eq!(counting_difference(&h0, &h0, 0.77).unwrap(), 0);
        assert_eq!(counting_difference(&h, &h0, -10.0).unwrap(), 0);
        let negatives = h.values().iter().filter(|&&v| v < 0.0).count() as i64;
        assert!(negatives >= 1);
        assert_eq!(counting_difference(&h, &h0, -1e-9).unwrap(), negatives);
        let e = h.values()[3];
        assert!(matches!(
            counting_difference(&h, &h0, e),
            Err(Error::DegenerateEnergy { .. })
        ));
    }

    #[test]
    fn partial_vectors_have_small_residual() {
        let g = Grid::line(30.0, 1500).unwrap();
        let h = build_perturbed(&g, &Potential::gaussian(-1.0, 1.0)).unwrap();
        let sys = eigendecompose_below(&h, 2.0).unwrap();
        assert_eq!(sys.vector_count(), sys.count_below(2.0));
        assert!(sys.max_residual(&h) < 1e-8 * sys.norm());
        let gram = sys.vectors().transpose() * sys.vectors();
        let n = sys.vector_count();
        assert!((gram - DMatrix::identity(n, n)).amax() < 1e-10);
    }
}
