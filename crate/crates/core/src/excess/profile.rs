use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Grid;

/// Smooth cutoff `ϑ_R(x) = ϑ(|x|/R)`: one on `|s| ≤ p`, a `C^∞` monotone
/// step down to zero at `|s| = 1`, zero beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffProfile {
    pub radius: f64,
    /// Half-width `p` of the plateau in units of `R`, in `(0, 1)`.
    pub plateau: f64,
}

/// Largest admissible `R` as a fraction of the box length.
pub const BOX_FRACTION: f64 = 0.2;

fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / t).exp();
    let b = (-1.0 / (1.0 - t)).exp();
    a / (a + b)
}

impl CutoffProfile {
    pub fn new(radius: f64) -> Self {
        Self { radius, plateau: 0.5 }
    }

    pub fn with_plateau(mut self, plateau: f64) -> Self {
        self.plateau = plateau;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::config("excess.radii", format!("cutoff radius {} must be positive", self.radius)));
        }
        if !(self.plateau > 0.0 && self.plateau < 1.0) {
            return Err(Error::config(
                "excess.plateau",
                format!("plateau {} must lie in (0, 1)", self.plateau),
            ));
        }
        Ok(())
    }

    /// Unscaled profile `ϑ(s)`.
    pub fn shape(&self, s: f64) -> f64 {
        let s = s.abs();
        if s <= self.plateau {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            smooth_step((1.0 - s) / (1.0 - self.plateau))
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.shape(x / self.radius)
    }

    /// `ϑ_R(x_i)²` at every node, without the box guard.
    pub fn weights_unchecked(&self, grid: &Grid) -> Vec<f64> {
        grid.nodes().into_iter().map(|x| self.value(x).powi(2)).collect()
    }
}

/// `ϑ_R(x_i)²` at every node. Refuses radii above a fifth of the box.
pub fn cutoff_weights(grid: &Grid, profile: &CutoffProfile) -> Result<Vec<f64>> {
    profile.validate()?;
    let limit = BOX_FRACTION * grid.box_length();
    if profile.radius > limit * (1.0 + 1e-12) {
        return Err(Error::BoxContamination {
            radius: profile.radius,
            limit,
        });
    }
    Ok(profile.weights_unchecked(grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_values() {
        let p = CutoffProfile::new(4.0);
        assert_eq!(p.value(0.0), 1.0);
        assert_eq!(p.value(2.0), 1.0);
        assert_eq!(p.value(4.0), 0.0);
        assert_eq!(p.value(-7.0), 0.0);
        // s = 3/4 sits at the middle of the step, where ϑ = 1/2.
        assert!((p.value(3.0) - 0.5).abs() < 1e-15);
        assert!((p.value(3.0).powi(2) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn profile_is_monotone_and_bounded() {
        let p = CutoffProfile::new(1.0).with_plateau(0.3);
        let vals: Vec<f64> = (0..=1000).map(|i| p.shape(i as f64 / 1000.0)).collect();
        assert!(vals.windows(2).all(|w| w[1] <= w[0]));
        assert!(vals.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn weights_and_box_guard() {
        let g = Grid::line(10.0, 199).unwrap();
        let w = cutoff_weights(&g, &CutoffProfile::new(4.0)).unwrap();
        assert_eq!(w[99], 1.0); // node at x = 0
        assert_eq!(w[0], 0.0);
        assert!(matches!(
            cutoff_weights(&g, &CutoffProfile::new(4.5)),
            Err(Error::BoxContamination { .. })
        ));
    }
}
