use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fit of `Z_R = Z_∞ + c R^{-ε}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RFit {
    pub limit: f64,
    pub amplitude: f64,
    pub exponent: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
}

pub const EXPONENT_MAX: f64 = 3.0;
const GRID_STEPS: usize = 300;

/// Relative floor below which differences count as rounding noise when
/// checking that the tail is monotone.
const NOISE_FLOOR: f64 = 1e-9;

fn linear_fit(radii: &[f64], values: &[f64], exponent: f64) -> RFit {
    let n = radii.len() as f64;
    let t: Vec<f64> = radii.iter().map(|r| r.powf(-exponent)).collect();
    let tm = t.iter().sum::<f64>() / n;
    let zm = values.iter().sum::<f64>() / n;
    let stt: f64 = t.iter().map(|x| (x - tm).powi(2)).sum();
    let stz: f64 = t.iter().zip(values).map(|(x, z)| (x - tm) * (z - zm)).sum();
    let amplitude = if stt > 0.0 { stz / stt } else { 0.0 };
    let limit = zm - amplitude * tm;
    let ss: f64 = t
        .iter()
        .zip(values)
        .map(|(x, z)| (z - limit - amplitude * x).powi(2))
        .sum();
    RFit {
        limit,
        amplitude,
        exponent,
        residual: (ss / n).sqrt(),
    }
}

/// Smallest admissible exponent, `ln 2 / ln(R_max/R_min)`: at this rate the
/// remainder beyond `R_max` equals the variation seen across the ladder, so
/// slower decays would extrapolate further than the data can support.
pub fn exponent_floor(radii: &[f64]) -> f64 {
    std::f64::consts::LN_2 / (radii[radii.len() - 1] / radii[0]).ln()
}

/// Least-squares fit over `(Z_∞, c, ε)` with `ε ∈ [ε_floor, 3]`: linear in
/// `(Z_∞, c)` for each `ε`, grid search plus golden-section refinement in
/// `ε`. Rejects a tail that changes direction by more than `max_residual`
/// (smaller wiggles are indistinguishable from fit noise) or a residual
/// above `max_residual`.
pub fn extrapolate_r(radii: &[f64], values: &[f64], max_residual: f64) -> Result<RFit> {
    if radii.len() < 4 || radii.len() != values.len() {
        return Err(Error::ExtrapolationUnreliable(format!(
            "need at least 4 (R, Z_R) pairs, got {}",
            radii.len().min(values.len())
        )));
    }
    if radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 0.0 {
        return Err(Error::ExtrapolationUnreliable("radii must be positive and increasing".into()));
    }
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let diffs: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let tail = &diffs[diffs.len() - 2..];
    let noise = (NOISE_FLOOR * scale).max(max_residual);
    if tail.iter().all(|d| d.abs() > noise) && tail[0].signum() != tail[1].signum() {
        return Err(Error::ExtrapolationUnreliable(format!(
            "non-monotone tail: Z_R = {values:?} at R = {radii:?}"
        )));
    }

    let lo = exponent_floor(radii);
    let step = (EXPONENT_MAX - lo) / GRID_STEPS as f64;
    let mut best = linear_fit(radii, values, lo);
    for k in 1..=GRID_STEPS {
        let fit = linear_fit(radii, values, lo + k as f64 * step);
        if fit.residual < best.residual {
            best = fit;
        }
    }
    let (mut a, mut b) = ((best.exponent - step).max(lo), (best.exponent + step).min(EXPONENT_MAX));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if linear_fit(radii, values, x1).residual <= linear_fit(radii, values, x2).residual {
            b = x2;
        } else {
            a = x1;
        }
    }
    let refined = linear_fit(radii, values, 0.5 * (a + b));
    if refined.residual < best.residual {
        best = refined;
    }
    if !(best.residual <= max_residual) {
        return Err(Error::ExtrapolationUnreliable(format!(
            "fit residual {:e} exceeds {max_residual:e} (Z_∞ = {}, ε = {}); Z_R = {values:?}",
            best.residual, best.limit, best.exponent
        )));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence() {
        let fit = extrapolate_r(&[5.0, 10.0, 20.0, 40.0], &[3.0; 4], 1e-12).unwrap();
        assert!((fit.limit - 3.0).abs() < 1e-14);
        assert!(fit.residual < 1e-14);
    }

    #[test]
    fn exact_power_law() {
        let r = [5.0, 10.0, 20.0, 40.0];
        let z: Vec<f64> = r.iter().map(|x| 1.0 + 1.0 / x).collect();
        let fit = extrapolate_r(&r, &z, 1e-10).unwrap();
        assert!((fit.limit - 1.0).abs() < 1e-6, "{fit:?}");
        assert!((fit.exponent - 1.0).abs() < 1e-6, "{fit:?}");
    }

    #[test]
    fn rejects_zigzag_tail_and_short_input() {
        let r = [5.0, 10.0, 20.0, 40.0];
        assert!(extrapolate_r(&r, &[1.0, 1.5, 1.2, 1.4], 0.1).is_err());
        assert!(extrapolate_r(&r[..3], &[1.0, 1.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn flat_noisy_tail_stays_within_its_range() {
        let r = [5.0, 10.0, 20.0, 40.0];
        let z = [0.93045, 0.93019, 0.93061, 0.93063];
        let fit = extrapolate_r(&r, &z, 0.01).unwrap();
        assert!((fit.exponent - exponent_floor(&r)).abs() < 1e-6);
        let (lo, hi) = (0.93019 - 4.4e-4, 0.93063 + 4.4e-4);
        assert!(fit.limit > lo && fit.limit < hi, "{fit:?}");
    }

    #[test]
    fn residual_threshold() {
        let r = [5.0, 10.0, 20.0, 40.0, 80.0];
        let z = [0.0, 1.0, 1.1, 1.8, 1.9];
        assert!(matches!(
            extrapolate_r(&r, &z, 1e-6),
            Err(Error::ExtrapolationUnreliable(_))
        ));
    }

    proptest::proptest! {
        #[test]
        fn recovers_synthetic_models(limit in -3.0f64..3.0, amp in -2.0f64..2.0, eps in 0.3f64..2.5) {
            proptest::prop_assume!(amp.abs() > 0.05);
            let r = [4.0f64, 8.0, 16.0, 32.0, 64.0];
            let z: Vec<f64> = r.iter().map(|x| limit + amp * x.powf(-eps)).collect();
            let fit = extrapolate_r(&r, &z, 1e-8).unwrap();
            proptest::prop_assert!((fit.limit - limit).abs() < 1e-5);
            proptest::prop_assert!((fit.exponent - eps).abs() < 1e-4);
        }
    }
}
