use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::EigenSystem;

/// Shift `M` and power `ℓ` of the map `μ(λ) = (λ + M)^{-ℓ}` taking `H`, `H₀`
/// to the bounded pair `A = (H+M)^{-ℓ}`, `A₀ = (H₀+M)^{-ℓ}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub shift: f64,
    pub power: u32,
}

impl TransformParams {
    pub fn new(shift: f64, power: u32) -> Self {
        Self { shift, power }
    }

    /// `M = 2 + max(0, -inf σ(H))`, `ℓ = 1`.
    pub fn default_for(spectrum_min: f64) -> Self {
        Self::new(2.0 + (-spectrum_min).max(0.0), 1)
    }

    /// Smallest admissible power in dimension `n`: `ℓ = 1` for `n ≤ 3`,
    /// otherwise the integer with `n/2 - 1 < ℓ ≤ n/2`.
    pub fn power_for_dimension(dimension: usize) -> u32 {
        ((dimension / 2) as u32).max(1)
    }

    /// Lower bound the shift has to exceed for a spectrum starting at
    /// `spectrum_min`.
    pub fn required_shift(spectrum_min: f64) -> f64 {
        1.0 + (-spectrum_min).max(0.0)
    }

    pub fn validate(&self, spectrum_min: f64) -> Result<()> {
        let required = Self::required_shift(spectrum_min);
        if !(self.shift > required) || !self.shift.is_finite() {
            return Err(Error::ShiftTooSmall {
                shift: self.shift,
                required,
            });
        }
        if self.power == 0 {
            return Err(Error::ShiftTooSmall {
                shift: self.shift,
                required,
            });
        }
        Ok(())
    }

    pub fn mu(&self, energy: f64) -> f64 {
        (energy + self.shift).powi(-(self.power as i32))
    }

    pub fn mu_complex(&self, z: Complex64) -> Complex64 {
        (z + self.shift).powi(-(self.power as i32))
    }

    /// `|μ'(λ)| = ℓ (λ + M)^{-ℓ-1}`.
    pub fn mu_slope(&self, energy: f64) -> f64 {
        self.power as f64 * (energy + self.shift).powi(-(self.power as i32) - 1)
    }

    /// Start point of every contour, `w₀ = (λ_min + M - 1)^{-ℓ}` with
    /// `λ_min = min(inf σ(H), 0)`; strictly above both transformed spectra.
    pub fn contour_start(&self, spectrum_min: f64) -> f64 {
        (spectrum_min.min(0.0) + self.shift - 1.0).powi(-(self.power as i32))
    }
}

/// `μ(λ_j) = (λ_j + M)^{-ℓ}` for every eigenvalue, in the eigenvalue order
/// (so the result is decreasing).
pub fn transform_spectrum(eig: &EigenSystem, params: &TransformParams) -> Result<Vec<f64>> {
    params.validate(eig.min())?;
    Ok(eig.values().iter().map(|&v| params.mu(v)).collect())
}

/// Transformed spectra of a pair `(H, H₀)` on the same grid.
#[derive(Debug, Clone)]
pub struct TransformedPair {
    pub params: TransformParams,
    /// `μ(λ_j(H))`, decreasing.
    pub perturbed: Vec<f64>,
    /// `μ(λ_j(H₀))`, decreasing.
    pub free: Vec<f64>,
    /// `min(inf σ(H), inf σ(H₀))`.
    pub spectrum_min: f64,
}

impl TransformedPair {
    pub fn new(eig_h: &EigenSystem, eig_h0: &EigenSystem, params: TransformParams) -> Result<Self> {
        if eig_h.dim() != eig_h0.dim() {
            return Err(Error::InvalidGrid(format!(
                "pair dimensions differ: {} vs {}",
                eig_h.dim(),
                eig_h0.dim()
            )));
        }
        let spectrum_min = eig_h.min().min(eig_h0.min());
        params.validate(spectrum_min)?;
        Ok(Self {
            params,
            perturbed: transform_spectrum(eig_h, &params)?,
            free: transform_spectrum(eig_h0, &params)?,
            spectrum_min,
        })
    }

    pub fn contour_start(&self) -> f64 {
        self.params.contour_start(self.spectrum_min)
    }

    /// Transformed eigenvalues of both operators strictly inside `(lo, hi)`.
    pub fn poles_between(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut poles: Vec<f64> = self
            .perturbed
            .iter()
            .chain(&self.free)
            .copied()
            .filter(|&a| a > lo && a < hi)
            .collect();
        poles.sort_by(f64::total_cmp);
        poles.dedup();
        poles
    }

    pub fn distance_to_poles(&self, w: Complex64) -> f64 {
        self.perturbed
            .iter()
            .chain(&self.free)
            .map(|&a| (Complex64::new(a, 0.0) - w).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `Tr[(A - w)^{-1} - (A₀ - w)^{-1}]` without a pole check.
    pub fn trace_unchecked(&self, w: Complex64) -> Complex64 {
        // Pairing j-th with j-th turns the difference into
        // (a₀ - a)/((a - w)(a₀ - w)), which avoids cancellation between
        // two large sums.
        let mut sum = Complex64::new(0.0, 0.0);
        for (&a, &a0) in self.perturbed.iter().zip(&self.free) {
            if a != a0 {
                sum += (a0 - a) / ((a - w) * (a0 - w));
            }
        }
        sum
    }

    pub fn trace(&self, w: Complex64) -> Result<Complex64> {
        let distance = self.distance_to_poles(w);
        if distance < 1e-14 {
            return Err(Error::PoleProximity {
                point: format!("{w}"),
                distance,
            });
        }
        Ok(self.trace_unchecked(w))
    }
}

/// Exact finite-sum trace of the resolvent difference of the transformed
/// pair at `w`.
pub fn trace_resolvent_diff(
    eig_h: &EigenSystem,
    eig_h0: &EigenSystem,
    params: &TransformParams,
    w: Complex64,
) -> Result<Complex64> {
    TransformedPair::new(eig_h, eig_h0, *params)?.trace(w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_direct_values() {
        assert_eq!(TransformParams::new(2.0, 1).mu(0.0), 0.5);
        assert_eq!(TransformParams::new(2.0, 2).mu(2.0), 1.0 / 16.0);
    }

    #[test]
    fn shift_validation() {
        assert!(TransformParams::new(2.0, 1).validate(-0.5).is_ok());
        assert!(matches!(
            TransformParams::new(1.2, 1).validate(-0.5),
            Err(Error::ShiftTooSmall { .. })
        ));
        assert!(TransformParams::new(1.0, 1).validate(0.0).is_err());
    }

    #[test]
    fn contour_start_sits_above_spectra() {
        let p = TransformParams::new(2.5, 2);
        let lam_min = -1.2;
        let w0 = p.contour_start(lam_min);
        assert!(w0 > p.mu(lam_min));
    }

    #[test]
    fn power_for_dimension() {
        assert_eq!(TransformParams::power_for_dimension(1), 1);
        assert_eq!(TransformParams::power_for_dimension(3), 1);
        assert_eq!(TransformParams::power_for_dimension(4), 2);
        assert_eq!(TransformParams::power_for_dimension(5), 2);
        assert_eq!(TransformParams::power_for_dimension(6), 3);
    }

    #[test]
    fn one_by_one_pair() {
        let pair = TransformedPair {
            params: TransformParams::new(2.0, 1),
            perturbed: vec![0.4],
            free: vec![0.5],
            spectrum_min: 0.0,
        };
        let i = Complex64::new(0.0, 1.0);
        let expected = 1.0 / (Complex64::new(0.4, 0.0) - i) - 1.0 / (Complex64::new(0.5, 0.0) - i);
        assert!((pair.trace(i).unwrap() - expected).norm() < 1e-15);
        assert!(matches!(
            pair.trace(Complex64::new(0.4, 0.0)),
            Err(Error::PoleProximity { .. })
        ));
    }

    /// Error-free `a + b = s + e`.
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    /// Double-double accumulator.
    #[derive(Default)]
    struct Dd(f64, f64);

    impl Dd {
        fn add(&mut self, x: f64) {
            let (s, e) = two_sum(self.0, x);
            let (hi, lo) = two_sum(s, e + self.1);
            self.0 = hi;
            self.1 = lo;
        }
    }

    #[test]
    fn square_well_trace_matches_extended_precision_sum() {
        use crate::operators::{build_free, build_perturbed, Grid, Potential};
        use crate::spectral::eigenvalues_only;
        let g = Grid::line(20.0, 2000).unwrap();
        let h0 = eigenvalues_only(&build_free(&g)).unwrap();
        let h = eigenvalues_only(&build_perturbed(&g, &Potential::square_well(-2.0, 1.0)).unwrap()).unwrap();
        let params = TransformParams::default_for(h.min());
        let pair = TransformedPair::new(&h, &h0, params).unwrap();
        let w0 = pair.contour_start();
        for w in [
            Complex64::new(w0, 0.0),
            Complex64::new(w0, 1e-3),
            Complex64::new(params.mu(1.0), 1e-3),
            Complex64::new(params.mu(0.3), 1e-5),
        ] {
            // Unpaired sums, each term split into real and imaginary parts
            // and accumulated in double-double.
            let (mut re, mut im) = (Dd::default(), Dd::default());
            for (vals, sign) in [(&pair.perturbed, 1.0), (&pair.free, -1.0)] {
                for &a in vals.iter() {
                    let dx = a - w.re;
                    let den = dx * dx + w.im * w.im;
                    re.add(sign * dx / den);
                    im.add(sign * w.im / den);
                }
            }
            let oracle = Complex64::new(re.0 + re.1, im.0 + im.1);
            let got = pair.trace(w).unwrap();
            let scale = oracle.norm().max(1.0);
            assert!((got - oracle).norm() <= 1e-12 * scale, "w = {w}: {got} vs {oracle}");
        }
    }

    proptest::proptest! {
        #[test]
        fn conjugate_symmetry(re in 0.0f64..1.0, im in 1e-6f64..1.0, shift in 0.0f64..0.3) {
            let pair = TransformedPair {
                params: TransformParams::new(2.0, 1),
                perturbed: vec![0.45 - shift, 0.3, 0.1],
                free: vec![0.5, 0.31, 0.12 + shift],
                spectrum_min: 0.0,
            };
            let w = Complex64::new(re, im);
            let a = pair.trace(w.conj()).unwrap();
            let b = pair.trace(w).unwrap().conj();
            proptest::prop_assert!((a - b).norm() <= 1e-14 * b.norm().max(1.0));
        }

        #[test]
        fn transformed_spectrum_is_reversed(values in proptest::collection::vec(-0.5f64..50.0, 3..20)) {
            let mut sorted = values.clone();
            sorted.sort_by(f64::total_cmp);
            let p = TransformParams::new(2.0, 2);
            let mu: Vec<f64> = sorted.iter().map(|&v| p.mu(v)).collect();
            proptest::prop_assert!(mu.windows(2).all(|w| w[1] <= w[0]));
            proptest::prop_assert!(mu.iter().all(|&m| m > 0.0 && m < 1.0));
        }
    }
}
