use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transform::TransformParams;
use crate::error::{Error, Result};
use crate::operators::{build_free, build_perturbed, japanese, Grid, Potential};
use crate::spectral::{eigendecompose, EigenSystem};

/// Admissible weight exponents `3/2 < β < (α - n)/2`.
pub fn beta_window(potential: &Potential, dimension: usize) -> Result<(f64, f64)> {
    if potential.is_zero() {
        return Ok((1.5, f64::INFINITY));
    }
    let cert = potential.decay.ok_or_else(|| {
        Error::CertificateRejected("weight window needs a decay certificate (α, C)".into())
    })?;
    Ok((1.5, 0.5 * (cert.alpha - dimension as f64)))
}

pub fn check_beta(beta: f64, potential: &Potential, dimension: usize) -> Result<()> {
    let (lo, hi) = beta_window(potential, dimension)?;
    if !(beta > lo && beta < hi) {
        return Err(Error::InvalidBeta { beta, lo, hi });
    }
    Ok(())
}

fn dimension_of(grid: &Grid) -> usize {
    if grid.angular_momentum().is_some() {
        3
    } else {
        1
    }
}

/// Singular-value sums of `W = ⟨x⟩^β (A - A₀) ⟨x⟩^β` along a refinement
/// ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightProbe {
    pub beta: f64,
    pub points: Vec<usize>,
    pub sums: Vec<f64>,
    /// `|s_{k+1} - s_k|`.
    pub differences: Vec<f64>,
}

impl WeightProbe {
    /// Successive differences shrink and the last one is below
    /// `fraction` of the final sum.
    pub fn is_cauchy(&self, fraction: f64) -> bool {
        let shrinking = self.differences.windows(2).all(|d| d[1] < d[0]);
        let last = self.differences.last().copied().unwrap_or(0.0);
        let value = self.sums.last().copied().unwrap_or(0.0);
        shrinking && last <= fraction * value.abs()
    }
}

/// `A = V diag(μ(λ_j)) Vᵀ` from a full eigendecomposition.
fn transformed_matrix(eig: &EigenSystem, params: &TransformParams) -> DMatrix<f64> {
    let v = eig.vectors();
    let mut scaled = v.clone();
    for (j, &lam) in eig.values().iter().enumerate() {
        scaled.column_mut(j).scale_mut(params.mu(lam));
    }
    &scaled * v.transpose()
}

fn full_vectors(eig: &EigenSystem) -> Result<()> {
    if eig.vector_count() < eig.dim() {
        return Err(Error::MissingEigenvectors {
            needed: eig.dim(),
            available: eig.vector_count(),
        });
    }
    Ok(())
}

fn weight_sum(grid: &Grid, potential: &Potential, params: &TransformParams, beta: f64) -> Result<f64> {
    let h = eigendecompose(&build_perturbed(grid, potential)?)?;
    let h0 = eigendecompose(&build_free(grid))?;
    params.validate(h.min().min(h0.min()))?;
    let diff = transformed_matrix(&h, params) - transformed_matrix(&h0, params);
    let d = DVector::from_iterator(grid.points(), grid.nodes().into_iter().map(|x| japanese(x).powf(beta)));
    let w = DMatrix::from_fn(diff.nrows(), diff.ncols(), |i, j| d[i] * diff[(i, j)] * d[j]);
    // W is symmetric, so its singular values are the moduli of its eigenvalues.
    let eig = nalgebra::SymmetricEigen::new(w);
    Ok(eig.eigenvalues.iter().map(|v| v.abs()).sum())
}

pub fn w_trace_probe(grids: &[Grid], potential: &Potential, params: &TransformParams, beta: f64) -> Result<WeightProbe> {
    let dim = grids.first().map(dimension_of).unwrap_or(1);
    check_beta(beta, potential, dim)?;
    let sums = grids
        .par_iter()
        .map(|g| weight_sum(g, potential, params, beta))
        .collect::<Result<Vec<_>>>()?;
    let differences = sums.windows(2).map(|s| (s[1] - s[0]).abs()).collect();
    Ok(WeightProbe {
        beta,
        points: grids.iter().map(|g| g.points()).collect(),
        sums,
        differences,
    })
}

/// Norms of `⟨x⟩^{-β} (A₀ - w)^{-1} (A - w)^{-1} ⟨x⟩^{-β}` at
/// `w = μ(λ + iη)` along an η-sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryProbe {
    pub energy: f64,
    pub beta: f64,
    pub etas: Vec<f64>,
    pub norms: Vec<f64>,
    pub differences: Vec<f64>,
}

impl BoundaryProbe {
    /// Smallest ratio `d_k / d_{k+1}` of successive differences.
    pub fn min_contraction(&self) -> f64 {
        self.differences
            .windows(2)
            .map(|d| d[0] / d[1])
            .fold(f64::INFINITY, f64::min)
    }
}

/// `etas` are heights in energy units; both systems need every eigenvector.
pub fn boundary_limit_probe(
    eig_h: &EigenSystem,
    eig_h0: &EigenSystem,
    params: &TransformParams,
    energy: f64,
    beta: f64,
    etas: &[f64],
) -> Result<BoundaryProbe> {
    full_vectors(eig_h)?;
    full_vectors(eig_h0)?;
    params.validate(eig_h.min().min(eig_h0.min()))?;
    if etas.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::DomainCoverage("η values must be positive".into()));
    }
    let grid = eig_h.grid();
    let weights: Vec<f64> = grid.nodes().into_iter().map(|x| japanese(x).powf(-beta)).collect();
    let n = eig_h.dim();

    // B = P diag(g₀) C diag(g) Q with P = D V₀, C = V₀ᵀ V, Q = Vᵀ D.
    let v = eig_h.vectors();
    let v0 = eig_h0.vectors();
    let c = v0.transpose() * v;
    let p = DMatrix::from_fn(n, n, |i, j| Complex64::new(weights[i] * v0[(i, j)], 0.0));
    let q = DMatrix::from_fn(n, n, |i, j| Complex64::new(v[(j, i)] * weights[j], 0.0));
    let mu: Vec<f64> = eig_h.values().iter().map(|&l| params.mu(l)).collect();
    let mu0: Vec<f64> = eig_h0.values().iter().map(|&l| params.mu(l)).collect();

    let norms = etas
        .par_iter()
        .map(|&eta| {
            let w = params.mu_complex(Complex64::new(energy, eta));
            let g: Vec<Complex64> = mu.iter().map(|&a| 1.0 / (a - w)).collect();
            let g0: Vec<Complex64> = mu0.iter().map(|&a| 1.0 / (a - w)).collect();
            let x = DMatrix::from_fn(n, n, |i, j| g0[i] * c[(i, j)] * g[j]);
            let b = &p * x * &q;
            b.singular_values().max()
        })
        .collect::<Vec<_>>();
    if norms.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverFailure { residual: f64::NAN });
    }
    let differences = norms.windows(2).map(|s| (s[1] - s[0]).abs()).collect();
    Ok(BoundaryProbe {
        energy,
        beta,
        etas: etas.to_vec(),
        norms,
        differences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::DecayCertificate;

    fn certified_gaussian() -> Potential {
        Potential::gaussian(-1.0, 1.0).with_certificate(DecayCertificate {
            alpha: 8.0,
            constant: 1.0,
        })
    }

    #[test]
    fn window_edges() {
        assert_eq!(beta_window(&certified_gaussian(), 1).unwrap(), (1.5, 3.5));
        assert_eq!(beta_window(&Potential::zero(), 1).unwrap().1, f64::INFINITY);
        assert!(matches!(
            check_beta(3.5 * 1.1, &certified_gaussian(), 1),
            Err(Error::InvalidBeta { .. })
        ));
        assert!(check_beta(1.5, &certified_gaussian(), 1).is_err());
        assert!(check_beta(2.5, &certified_gaussian(), 1).is_ok());
        assert!(matches!(
            check_beta(2.5, &Potential::gaussian(-1.0, 1.0), 1),
            Err(Error::CertificateRejected(_))
        ));
    }

    #[test]
    fn zero_potential_has_zero_weight_sums() {
        let grids: Vec<Grid> = [39, 79].iter().map(|&n| Grid::line(5.0, n).unwrap()).collect();
        let probe = w_trace_probe(&grids, &Potential::zero(), &TransformParams::new(2.0, 1), 2.5).unwrap();
        assert!(probe.sums.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn weight_sums_settle_under_refinement() {
        let grids: Vec<Grid> = [49, 99, 199].iter().map(|&n| Grid::line(6.0, n).unwrap()).collect();
        let probe = w_trace_probe(&grids, &certified_gaussian(), &TransformParams::new(3.0, 1), 2.5).unwrap();
        assert!(probe.differences[1] < probe.differences[0], "{probe:?}");
    }

    #[test]
    fn free_boundary_norms_settle() {
        let g = Grid::line(6.0, 120).unwrap();
        let h0 = eigendecompose(&build_free(&g)).unwrap();
        // Put λ halfway between two free eigenvalues.
        let i = h0.count_below(1.0);
        let lam = 0.5 * (h0.values()[i - 1] + h0.values()[i]);
        let etas: Vec<f64> = (0..6).map(|j| 0.02 * 0.5f64.powi(j)).collect();
        let probe = boundary_limit_probe(&h0, &h0, &TransformParams::new(2.0, 1), lam, 2.0, &etas).unwrap();
        assert!(probe.min_contraction() > 1.5, "{probe:?}");
    }

    #[test]
    fn needs_full_vectors() {
        let g = Grid::line(6.0, 50).unwrap();
        let h0 = crate::spectral::eigenvalues_only(&build_free(&g)).unwrap();
        assert!(matches!(
            boundary_limit_probe(&h0, &h0, &TransformParams::new(2.0, 1), 1.0, 2.0, &[0.1]),
            Err(Error::MissingEigenvectors { .. })
        ));
    }
}
