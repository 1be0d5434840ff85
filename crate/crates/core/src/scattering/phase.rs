use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::numerov::{default_matching_radius, phase_shift, Channel, PhaseOptions};
use crate::error::{Error, Result};
use crate::operators::Potential;

/// Largest admissible `|δ(k_max)|` after unwrapping.
pub const ANCHOR_LIMIT: f64 = 0.2;
/// Weighted channel terms `(2ℓ+1)|δ_ℓ|` below this are integration noise.
const TAIL_NOISE: f64 = 1e-9;
/// Minimal separation of the two best branch candidates.
const AMBIGUITY: f64 = 0.1;

/// Continuous phase shift of one channel on an increasing momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCurve {
    pub channel: Channel,
    pub momenta: Vec<f64>,
    pub phases: Vec<f64>,
    /// Matching radius at the largest momentum.
    pub matching_radius: f64,
}

impl PhaseCurve {
    /// Phase at a momentum that is a sample of the grid.
    pub fn at(&self, k: f64) -> Result<f64> {
        let i = self.momenta.partition_point(|&m| m < k * (1.0 - 1e-12));
        match self.momenta.get(i) {
            Some(&m) if (m - k).abs() <= 1e-12 * k.max(1.0) => Ok(self.phases[i]),
            _ => Err(Error::DomainCoverage(format!(
                "momentum {k} is not on the {} channel grid",
                self.channel.label()
            ))),
        }
    }
}

/// Adds multiples of `π` to mod-`π` samples so that successive values move
/// as little as possible, walking down from the last sample, which is kept.
pub fn unwrap_raw(raw: &[f64], momenta: &[f64]) -> Result<Vec<f64>> {
    let n = raw.len();
    let mut out = raw.to_vec();
    for i in (0..n.saturating_sub(1)).rev() {
        let target = out[i + 1];
        let m = ((target - raw[i]) / PI).round();
        let best = raw[i] + m * PI;
        let d = (best - target).abs();
        let second = [raw[i] + (m - 1.0) * PI, raw[i] + (m + 1.0) * PI]
            .iter()
            .map(|c| (c - target).abs())
            .fold(f64::INFINITY, f64::min);
        if second - d < AMBIGUITY {
            return Err(Error::RefineGrid {
                momentum: momenta.get(i).copied().unwrap_or(f64::NAN),
            });
        }
        out[i] = best;
    }
    Ok(out)
}

/// [`unwrap_raw`] plus the high-energy anchor `|δ(k_max)| < 0.2`.
pub fn unwrap_phase(channel: Channel, momenta: &[f64], raw: &[f64], matching_radius: f64) -> Result<PhaseCurve> {
    if momenta.len() != raw.len() || momenta.is_empty() {
        return Err(Error::DomainCoverage("phase samples and momenta must match".into()));
    }
    if momenta.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::DomainCoverage("momentum grid must be strictly increasing".into()));
    }
    let phases = unwrap_raw(raw, momenta)?;
    let top = phases[phases.len() - 1];
    if top.abs() >= ANCHOR_LIMIT {
        return Err(Error::PhaseAnchor {
            momentum: momenta[momenta.len() - 1],
            phase: top,
        });
    }
    Ok(PhaseCurve {
        channel,
        momenta: momenta.to_vec(),
        phases,
        matching_radius,
    })
}

/// Phase shifts on a momentum grid (computed in parallel, order kept),
/// unwrapped from the top.
pub fn phase_curve(potential: &Potential, channel: Channel, momenta: &[f64], options: &PhaseOptions) -> Result<PhaseCurve> {
    let raw = momenta
        .par_iter()
        .map(|&k| phase_with_retry(potential, channel, k, options))
        .collect::<Result<Vec<_>>>()?;
    let k_max = momenta.last().copied().unwrap_or(1.0);
    let r_m = options
        .matching_radius
        .unwrap_or_else(|| default_matching_radius(potential, k_max));
    unwrap_phase(channel, momenta, &raw, r_m)
}

/// Moves the matching radius out by a quarter wavelength on a resonant
/// match.
fn phase_with_retry(potential: &Potential, channel: Channel, k: f64, options: &PhaseOptions) -> Result<f64> {
    match phase_shift(potential, channel, k, options) {
        Err(Error::ResonantMatching { radius, .. }) => {
            let shifted = PhaseOptions {
                matching_radius: Some(radius + 0.5 * PI / k),
                ..*options
            };
            phase_shift(potential, channel, k, &shifted)
        }
        other => other,
    }
}

/// Momentum grid with geometric spacing up to `k_split` and uniform steps
/// of at most `max_step` above, merged with the momenta `extra`.
pub fn momentum_grid(k_min: f64, k_max: f64, k_split: f64, points_low: usize, max_step: f64, extra: &[f64]) -> Vec<f64> {
    let mut ks = Vec::new();
    let split = k_split.clamp(k_min, k_max);
    if points_low > 1 && split > k_min {
        let ratio = (split / k_min).powf(1.0 / (points_low - 1) as f64);
        ks.extend((0..points_low).map(|i| k_min * ratio.powi(i as i32)));
    } else {
        ks.push(k_min);
    }
    let n = ((k_max - split) / max_step).ceil() as usize;
    ks.extend((1..=n).map(|i| split + (k_max - split) * i as f64 / n as f64));
    ks.extend_from_slice(extra);
    ks.sort_by(f64::total_cmp);
    ks.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    ks
}

/// `θ(λ)` on an energy grid with the partial-wave truncation record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TotalPhase {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest channel used (`None` on the line).
    pub l_max: Option<u32>,
    pub tail_bounds: Vec<f64>,
}

/// `θ(λ) = (δ₊(√λ) + δ₋(√λ))/π`; zero for `λ ≤ 0`.
pub fn total_phase_1d(even: &PhaseCurve, odd: &PhaseCurve, energies: &[f64]) -> Result<TotalPhase> {
    let values = energies
        .iter()
        .map(|&e| {
            if e <= 0.0 {
                return Ok(0.0);
            }
            let k = e.sqrt();
            Ok((even.at(k)? + odd.at(k)?) / PI)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TotalPhase {
        energies: energies.to_vec(),
        values,
        l_max: None,
        tail_bounds: vec![0.0; energies.len()],
    })
}

/// Geometric bound on `(1/π) Σ_{ℓ > L} (2ℓ+1)|δ_ℓ|` from the last three
/// channel terms.
pub fn tail_bound(terms: &[f64]) -> f64 {
    let n = terms.len();
    if n < 3 {
        return f64::INFINITY;
    }
    let t = &terms[n - 3..];
    if t[2] == 0.0 {
        return 0.0;
    }
    // At the integrator's noise floor the ratio test is meaningless; the
    // remaining sum is bounded by the noise itself.
    if t.iter().all(|&x| x <= TAIL_NOISE) {
        return t.iter().sum::<f64>() / PI;
    }
    let ratio = (t[2] / t[1]).max(t[1] / t[0]);
    if !(ratio < 1.0) {
        return f64::INFINITY;
    }
    t[2] * ratio / (1.0 - ratio) / PI
}

/// `ℓ_max = ⌈k a⌉ + 8`.
pub fn l_max_policy(k: f64, length: f64) -> u32 {
    (k * length).ceil() as u32 + 8
}

/// `θ(λ) = (1/π) Σ_{ℓ ≤ ℓ_max} (2ℓ+1) δ_ℓ(√λ)` from curves `channels[ℓ]`.
pub fn total_phase_3d(channels: &[PhaseCurve], energies: &[f64], tolerance: f64) -> Result<TotalPhase> {
    let mut values = Vec::with_capacity(energies.len());
    let mut tails = Vec::with_capacity(energies.len());
    for &e in energies {
        if e <= 0.0 {
            values.push(0.0);
            tails.push(0.0);
            continue;
        }
        let k = e.sqrt();
        let terms = channels
            .iter()
            .enumerate()
            .map(|(l, c)| Ok((2 * l + 1) as f64 * c.at(k)?))
            .collect::<Result<Vec<_>>>()?;
        let abs: Vec<f64> = terms.iter().map(|t| t.abs()).collect();
        let tail = tail_bound(&abs);
        if tail > tolerance {
            return Err(Error::TruncationTail { bound: tail, tolerance });
        }
        values.push(terms.iter().sum::<f64>() / PI);
        tails.push(tail);
    }
    Ok(TotalPhase {
        energies: energies.to_vec(),
        values,
        l_max: Some(channels.len().saturating_sub(1) as u32),
        tail_bounds: tails,
    })
}

/// Outcome of comparing the threshold phase with the bound-state count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevinsonCheck {
    pub expected: f64,
    pub observed: f64,
    pub residual: f64,
    pub pass: bool,
}

pub const LEVINSON_TOL: f64 = 0.15;

/// `|δ(k_min) - N π| < 0.15`; the even channel on the line expects
/// `(N - 1/2) π` because the free even channel has a zero-energy resonance.
pub fn levinson_check(curve: &PhaseCurve, bound_states: usize) -> LevinsonCheck {
    let n = bound_states as f64;
    let expected = match curve.channel {
        Channel::Even => (n - 0.5) * PI,
        _ => n * PI,
    };
    let observed = curve.phases[0];
    let residual = (observed - expected).abs();
    LevinsonCheck {
        expected,
        observed,
        residual,
        pass: residual < LEVINSON_TOL,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input_unwraps_to_zero() {
        let k: Vec<f64> = (1..=20).map(|i| i as f64 * 0.5).collect();
        let c = unwrap_phase(Channel::Odd, &k, &[0.0; 20], 1.0).unwrap();
        assert!(c.phases.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn sawtooth_recovers_line() {
        let k: Vec<f64> = (0..=510).map(|i| -10.0 + 0.02 * i as f64).collect();
        let raw: Vec<f64> = k.iter().map(|&x| (0.6 * x).tan().atan()).collect();
        let out = unwrap_raw(&raw, &k).unwrap();
        for (x, y) in k.iter().zip(&out) {
            assert!((y - 0.6 * x).abs() < 1e-12, "k = {x}");
        }
    }

    #[test]
    fn ambiguous_jump_needs_refinement() {
        let k = [1.0, 2.0];
        assert!(matches!(
            unwrap_raw(&[0.0, 1.55], &k),
            Err(Error::RefineGrid { .. })
        ));
    }

    #[test]
    fn anchor_violation() {
        let k = [1.0, 2.0];
        assert!(matches!(
            unwrap_phase(Channel::Odd, &k, &[0.5, 0.5], 1.0),
            Err(Error::PhaseAnchor { .. })
        ));
    }

    #[test]
    fn tail_bound_geometric() {
        assert_eq!(tail_bound(&[1.0, 0.5, 0.25]), 0.25 / PI);
        assert_eq!(tail_bound(&[1.0, 2.0, 3.0]), f64::INFINITY);
        // Noise-level terms are bounded by their sum, whatever their ratio.
        let noise = [3e-13, 7e-13, 1e-12];
        assert!((tail_bound(&noise) - 2e-12 / PI).abs() < 1e-25);
    }

    #[test]
    fn zero_potential_total_phase() {
        let v = Potential::zero();
        let es = [0.25, 1.0, 4.0];
        let ks: Vec<f64> = es.iter().map(|e: &f64| e.sqrt()).collect();
        let grid = momentum_grid(0.1, 10.0, 1.0, 5, 0.2, &ks);
        let opts = PhaseOptions::default();
        let even = phase_curve(&v, Channel::Even, &grid, &opts).unwrap();
        let odd = phase_curve(&v, Channel::Odd, &grid, &opts).unwrap();
        let t = total_phase_1d(&even, &odd, &es).unwrap();
        assert!(t.values.iter().all(|&x| x == 0.0));
        assert!(levinson_check(&odd, 0).pass);
    }

    #[test]
    fn square_well_levinson() {
        let v = Potential::square_well(-4.0, 1.0);
        let grid = momentum_grid(0.01, 20.0, 1.0, 60, 0.05, &[]);
        let c = phase_curve(&v, Channel::Radial { l: 0 }, &grid, &PhaseOptions::default()).unwrap();
        let check = levinson_check(&c, 1);
        assert!(check.pass, "{check:?}");
    }
}
