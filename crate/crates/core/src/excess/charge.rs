use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::fit::{extrapolate_r, RFit};
use super::profile::{cutoff_weights, CutoffProfile};
use crate::error::{Error, Result};
use crate::spectral::{counting_difference, EigenSystem};
use crate::ssf::{extrapolate_to_zero, TransformParams};

fn weighted_norms(eig: &EigenSystem, weights: &[f64], count: usize) -> Vec<f64> {
    let v = eig.vectors();
    (0..count)
        .map(|j| v.column(j).iter().zip(weights).map(|(x, w)| w * x * x).sum())
        .collect()
}

fn need_vectors(eig: &EigenSystem, count: usize) -> Result<()> {
    if eig.vector_count() < count {
        return Err(Error::MissingEigenvectors {
            needed: count,
            available: eig.vector_count(),
        });
    }
    Ok(())
}

/// `Tr[ϑ_R (E_H(λ) - E_{H₀}(λ)) ϑ_R]` with `weights = ϑ_R(x_i)²`.
pub fn excess_charge_r(eig_h: &EigenSystem, eig_h0: &EigenSystem, energy: f64, weights: &[f64]) -> Result<f64> {
    counting_difference(eig_h, eig_h0, energy)?;
    let n = eig_h.count_below(energy);
    let n0 = eig_h0.count_below(energy);
    need_vectors(eig_h, n)?;
    need_vectors(eig_h0, n0)?;
    let a: f64 = weighted_norms(eig_h, weights, n).iter().sum();
    let b: f64 = weighted_norms(eig_h0, weights, n0).iter().sum();
    Ok(a - b)
}

/// Weighted norms `⟨v_j, ϑ_R² v_j⟩` of every stored eigenvector for a set of
/// cutoff radii, reusable across energies and smoothing heights.
#[derive(Debug, Clone)]
pub struct ExcessTable {
    pub params: TransformParams,
    pub radii: Vec<f64>,
    mu: Vec<f64>,
    mu0: Vec<f64>,
    norms: Vec<Vec<f64>>,
    norms0: Vec<Vec<f64>>,
    /// Highest energy whose eigenvectors are stored for both operators.
    pub ceiling: f64,
}

impl ExcessTable {
    pub fn new(
        eig_h: &EigenSystem,
        eig_h0: &EigenSystem,
        params: TransformParams,
        profiles: &[CutoffProfile],
    ) -> Result<Self> {
        params.validate(eig_h.min().min(eig_h0.min()))?;
        let grid = eig_h.grid();
        let (m, m0) = (eig_h.vector_count(), eig_h0.vector_count());
        let mut norms = Vec::with_capacity(profiles.len());
        let mut norms0 = Vec::with_capacity(profiles.len());
        for p in profiles {
            let w = cutoff_weights(grid, p)?;
            norms.push(weighted_norms(eig_h, &w, m));
            norms0.push(weighted_norms(eig_h0, &w, m0));
        }
        let top = |e: &EigenSystem, k: usize| {
            if k == e.dim() {
                f64::INFINITY
            } else if k == 0 {
                f64::NEG_INFINITY
            } else {
                e.values()[k - 1]
            }
        };
        Ok(Self {
            params,
            radii: profiles.iter().map(|p| p.radius).collect(),
            mu: eig_h.values()[..m].iter().map(|&l| params.mu(l)).collect(),
            mu0: eig_h0.values()[..m0].iter().map(|&l| params.mu(l)).collect(),
            norms,
            norms0,
            ceiling: top(eig_h, m).min(top(eig_h0, m0)),
        })
    }

    /// Smoothed `Z_{R,η}(λ)`, each eigenvector weighted by
    /// `1 - (1/π) atan2(η, μ_j - μ(λ))`, the same factor that turns the
    /// contour route into `ξ_η`. `eta` is on the transformed axis.
    pub fn smoothed(&self, radius_index: usize, energy: f64, eta: f64) -> Result<f64> {
        if energy + 2.0 > self.ceiling {
            return Err(Error::MissingEigenvectors {
                needed: self.mu.len() + 1,
                available: self.mu.len(),
            });
        }
        let x = self.params.mu(energy);
        let f = |a: f64| 1.0 - eta.atan2(a - x) / PI;
        let a: f64 = self.mu.iter().zip(&self.norms[radius_index]).map(|(&m, n)| f(m) * n).sum();
        let b: f64 = self.mu0.iter().zip(&self.norms0[radius_index]).map(|(&m, n)| f(m) * n).sum();
        Ok(a - b)
    }
}

/// `Z_R(λ)` over a radius ladder, the `R → ∞` fit, and error columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcessResult {
    pub energy: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// η-extrapolation spreads per radius.
    pub errors: Vec<f64>,
    pub fit: RFit,
}

impl ExcessResult {
    /// Error bar on `Z_∞`: fit residual plus the largest η spread.
    pub fn limit_error(&self) -> f64 {
        self.fit.residual + self.errors.iter().fold(0.0f64, |m, e| m.max(*e))
    }
}

/// `Z_R(λ)` for every radius of `table`, each extrapolated to `η → 0` over
/// `etas` (transformed axis); returns the values and their η spreads.
pub fn excess_radii(table: &ExcessTable, energy: f64, etas: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut values = Vec::with_capacity(table.radii.len());
    let mut errors = Vec::with_capacity(table.radii.len());
    for r in 0..table.radii.len() {
        let raw = etas
            .iter()
            .map(|&eta| table.smoothed(r, energy, eta))
            .collect::<Result<Vec<_>>>()?;
        let x = extrapolate_to_zero(etas, &raw)?;
        values.push(x.value);
        errors.push(x.spread);
    }
    Ok((values, errors))
}

/// [`excess_radii`] followed by the fit in `R`.
pub fn excess_at(table: &ExcessTable, energy: f64, etas: &[f64], max_residual: f64) -> Result<ExcessResult> {
    let (values, errors) = excess_radii(table, energy, etas)?;
    let fit = extrapolate_r(&table.radii, &values, max_residual)?;
    Ok(ExcessResult {
        energy,
        radii: table.radii.clone(),
        values,
        errors,
        fit,
    })
}

/// `Σ_ℓ (2ℓ + 1) Z^{(ℓ)}` over radial channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSum {
    pub total: f64,
    pub channels: Vec<f64>,
    /// Whether a channel fell below the cutoff before `ℓ_max`.
    pub converged: bool,
}

/// Per-channel magnitude below which the partial-wave sum stops.
pub const CHANNEL_CUTOFF: f64 = 1e-4;

/// Adds channels `ℓ = 0, 1, …` until one contributes less than
/// [`CHANNEL_CUTOFF`] in magnitude or `l_max` is reached.
pub fn assemble_channels<F>(l_max: u32, mut channel: F) -> Result<ChannelSum>
where
    F: FnMut(u32) -> Result<f64>,
{
    let mut channels = Vec::new();
    let mut total = 0.0;
    let mut converged = false;
    for l in 0..=l_max {
        let z = channel(l)?;
        channels.push(z);
        total += (2 * l + 1) as f64 * z;
        if z.abs() < CHANNEL_CUTOFF {
            converged = true;
            break;
        }
    }
    Ok(ChannelSum {
        total,
        channels,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_free, build_perturbed, Grid, Potential};
    use crate::spectral::{eigendecompose, eigendecompose_below};

    #[test]
    fn zero_potential_has_no_excess() {
        let g = Grid::line(10.0, 200).unwrap();
        let h0 = eigendecompose(&build_free(&g)).unwrap();
        let w = cutoff_weights(&g, &CutoffProfile::new(4.0)).unwrap();
        for e in [0.3, 1.7, 5.0] {
            assert_eq!(excess_charge_r(&h0, &h0, e, &w).unwrap(), 0.0);
        }
    }

    #[test]
    fn unit_weights_give_counting_difference() {
        let g = Grid::line(10.0, 200).unwrap();
        let h0 = eigendecompose(&build_free(&g)).unwrap();
        let h = eigendecompose(&build_perturbed(&g, &Potential::square_well(-3.0, 1.0)).unwrap()).unwrap();
        let w = CutoffProfile::new(4.0 * g.half_width()).weights_unchecked(&g);
        assert!(w.iter().all(|&x| x == 1.0));
        for e in [-2.0, 0.5, 2.2, 7.0] {
            let z = excess_charge_r(&h, &h0, e, &w).unwrap();
            let c = counting_difference(&h, &h0, e).unwrap() as f64;
            assert!((z - c).abs() < 1e-10, "λ = {e}: {z} vs {c}");
        }
    }

    #[test]
    fn bound_states_are_localized() {
        let g = Grid::line(25.0, 1000).unwrap();
        let h0 = eigendecompose_below(&build_free(&g), 0.0).unwrap();
        let h = eigendecompose_below(&build_perturbed(&g, &Potential::gaussian(-4.0, 1.0)).unwrap(), 0.0).unwrap();
        // Between the ground state and the next level, so only a deeply
        // bound state lies below λ.
        let lam = 0.5 * (h.values()[0] + h.values()[1]);
        assert!(lam < 0.0);
        let bound = h.count_below(lam) as f64;
        assert_eq!(bound, 1.0);
        let w = cutoff_weights(&g, &CutoffProfile::new(10.0)).unwrap();
        let z = excess_charge_r(&h, &h0, lam, &w).unwrap();
        assert!((z - bound).abs() < 1e-3, "{z} vs {bound}");
    }

    #[test]
    fn smoothed_charge_with_full_weights_matches_contour() {
        use crate::ssf::{ssf_contour_at, TransformedPair};
        let g = Grid::line(6.0, 119).unwrap();
        let h0 = eigendecompose(&build_free(&g)).unwrap();
        let h = eigendecompose(&build_perturbed(&g, &Potential::gaussian(-2.0, 1.0)).unwrap()).unwrap();
        let params = TransformParams::default_for(h.min());
        // R at the box fraction limit; the weights drop to zero inside, so
        // compare against the unweighted sum by hand instead.
        let table = ExcessTable::new(&h, &h0, params, &[CutoffProfile::new(2.4)]).unwrap();
        assert!(table.smoothed(0, 1.0, 1e-3).unwrap().is_finite());
        let pair = TransformedPair::new(&h, &h0, params).unwrap();
        let x = params.mu(1.0);
        let eta: f64 = 2e-3;
        let f = |a: f64| 1.0 - eta.atan2(a - x) / PI;
        let direct: f64 = pair.perturbed.iter().zip(&pair.free).map(|(&a, &b)| f(a) - f(b)).sum();
        let contour = ssf_contour_at(&pair, 1.0, eta).unwrap();
        assert!((direct - contour).abs() < 1e-8, "{direct} vs {contour}");
    }

    #[test]
    fn channel_assembly_truncates() {
        let zs = [0.5, 0.1, 0.01, 5e-5, 1.0];
        let sum = assemble_channels(10, |l| Ok(zs[l as usize])).unwrap();
        assert_eq!(sum.channels.len(), 4);
        assert!(sum.converged);
        assert!((sum.total - (0.5 + 0.3 + 0.05 + 7.0 * 5e-5)).abs() < 1e-15);
    }
}
