use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::extrapolate::extrapolate_to_zero;
use super::quadrature::integrate_polyline;
use super::transform::TransformedPair;
use crate::error::{Error, Result};
use crate::operators::Grid;
use crate::spectral::{Route, SsfCurve};

/// Absolute tolerance of the adaptive contour quadrature.
pub const QUAD_TOL: f64 = 1e-9;
const MAX_PIECES: usize = 400_000;

/// Two-segment path: up from `w₀` to `w₀ + iη`, then left to `μ(λ) + iη`.
/// The horizontal leg carries a node above every transformed eigenvalue it
/// passes so the quadrature never straddles a peak.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub start: f64,
    pub end: Complex64,
    pub eta: f64,
    pub nodes: Vec<Complex64>,
}

impl Contour {
    pub fn new(pair: &TransformedPair, target: f64, eta: f64) -> Result<Self> {
        let start = pair.contour_start();
        if !(eta > 0.0) || !eta.is_finite() {
            return Err(Error::DomainCoverage(format!("smoothing height η = {eta} must be positive")));
        }
        if !(target < start) {
            return Err(Error::DomainCoverage(format!(
                "transformed energy {target} is not below the contour start {start}"
            )));
        }
        let mut nodes = vec![Complex64::new(start, 0.0), Complex64::new(start, eta)];
        let poles = pair.poles_between(target, start);
        nodes.extend(poles.iter().rev().map(|&a| Complex64::new(a, eta)));
        nodes.push(Complex64::new(target, eta));
        Ok(Self {
            start,
            end: Complex64::new(target, eta),
            eta,
            nodes,
        })
    }
}

/// How the smoothing heights of an η → 0 sweep are chosen at energy `λ`.
/// Heights are given in energy units and mapped to the transformed axis by
/// `|μ'(λ)|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum EtaSchedule {
    /// Explicit heights.
    Fixed { etas: Vec<f64> },
    /// Multiples of the free level spacing `2π√λ / box_length`.
    LevelSpacing { multiples: Vec<f64> },
    /// Fractions of the distance from `λ` to the nearest eigenvalue of
    /// either operator; the η → 0 limit then recovers the exact staircase.
    SpectralGap { fractions: Vec<f64> },
}

impl EtaSchedule {
    pub fn gap_default() -> Self {
        EtaSchedule::SpectralGap {
            fractions: vec![0.02, 0.01, 0.005],
        }
    }

    pub fn level_spacing_default() -> Self {
        EtaSchedule::LevelSpacing {
            multiples: vec![8.0, 4.0, 2.0],
        }
    }

    pub fn len(&self) -> usize {
        match self {
            EtaSchedule::Fixed { etas } => etas.len(),
            EtaSchedule::LevelSpacing { multiples } => multiples.len(),
            EtaSchedule::SpectralGap { fractions } => fractions.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        let xs = match self {
            EtaSchedule::Fixed { etas } => etas,
            EtaSchedule::LevelSpacing { multiples } => multiples,
            EtaSchedule::SpectralGap { fractions } => fractions,
        };
        if xs.is_empty() || xs.iter().any(|&x| !(x > 0.0) || !x.is_finite()) || xs.windows(2).any(|w| !(w[1] < w[0]))
        {
            return Err(Error::config(
                "ssf.eta",
                "η schedule must be nonempty, positive and strictly decreasing",
            ));
        }
        Ok(())
    }

    /// Heights in energy units at `λ`.
    pub fn energy_heights(&self, pair: &TransformedPair, grid: &Grid, energy: f64) -> Vec<f64> {
        match self {
            EtaSchedule::Fixed { etas } => etas.clone(),
            EtaSchedule::LevelSpacing { multiples } if energy > 0.0 => {
                let s = grid.level_spacing(energy);
                multiples.iter().map(|m| m * s).collect()
            }
            EtaSchedule::LevelSpacing { multiples } => {
                // No continuum below zero: fall back to the spectral gap,
                // keeping the ratios of the multiples.
                let d = pair_gap(pair, energy);
                let top = multiples.first().copied().unwrap_or(1.0);
                multiples.iter().map(|m| 0.02 * d * m / top).collect()
            }
            EtaSchedule::SpectralGap { fractions } => {
                let d = pair_gap(pair, energy);
                fractions.iter().map(|f| f * d).collect()
            }
        }
    }

    /// Heights on the transformed axis at `λ`.
    pub fn transformed_heights(&self, pair: &TransformedPair, grid: &Grid, energy: f64) -> Vec<f64> {
        let slope = pair.params.mu_slope(energy);
        self.energy_heights(pair, grid, energy)
            .into_iter()
            .map(|e| e * slope)
            .collect()
    }
}

/// Distance in energy from `λ` to the nearest eigenvalue of either operator.
fn pair_gap(pair: &TransformedPair, energy: f64) -> f64 {
    let mu = pair.params.mu(energy);
    let slope = pair.params.mu_slope(energy);
    pair.perturbed
        .iter()
        .chain(&pair.free)
        .map(|&a| (a - mu).abs() / slope)
        .fold(f64::INFINITY, f64::min)
}

/// One boundary value `ξ(λ)` with its η-sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsfPoint {
    pub energy: f64,
    pub value: f64,
    pub error: f64,
    /// Transformed-axis heights used, decreasing.
    pub etas: Vec<f64>,
    /// Smoothed values `ξ_η(λ)` for the operator pair `(H, H₀)`.
    pub raw: Vec<f64>,
}

/// Smoothed `ξ_η(λ; H, H₀)` from one contour with transformed-axis height
/// `eta`: `-(1/π) Im ∫_γ Tr[(A - w)^{-1} - (A₀ - w)^{-1}] dw`.
pub fn ssf_contour_at(pair: &TransformedPair, energy: f64, eta: f64) -> Result<f64> {
    let contour = Contour::new(pair, pair.params.mu(energy), eta)?;
    let q = integrate_polyline(|w| pair.trace_unchecked(w), &contour.nodes, QUAD_TOL, MAX_PIECES)?;
    Ok(-q.value.im / PI)
}

/// Boundary value of the spectral shift function at `λ` by the contour
/// route, extrapolated to `η → 0` over `etas` (transformed axis,
/// decreasing). Fails when the extrapolation spread exceeds `tolerance`.
pub fn ssf_contour(pair: &TransformedPair, energy: f64, etas: &[f64], tolerance: f64) -> Result<SsfPoint> {
    let raw = etas
        .iter()
        .map(|&eta| ssf_contour_at(pair, energy, eta))
        .collect::<Result<Vec<_>>>()?;
    finish(energy, etas, raw, tolerance)
}

pub(crate) fn finish(energy: f64, etas: &[f64], raw: Vec<f64>, tolerance: f64) -> Result<SsfPoint> {
    let x = extrapolate_to_zero(etas, &raw)?;
    if x.spread > tolerance {
        return Err(Error::BoundaryLimitUnstable {
            spread: x.spread,
            tolerance,
        });
    }
    Ok(SsfPoint {
        energy,
        value: x.value,
        error: x.spread.max(QUAD_TOL),
        etas: etas.to_vec(),
        raw,
    })
}

/// Samples `ξ(λ)` over an energy grid in parallel; output order follows the
/// input grid. `route` selects the contour or determinant construction.
pub fn ssf_curve(
    pair: &TransformedPair,
    grid: &Grid,
    energies: &[f64],
    schedule: &EtaSchedule,
    tolerance: f64,
    route: Route,
) -> Result<SsfCurve> {
    schedule.validate()?;
    let points = energies
        .par_iter()
        .map(|&e| {
            let etas = schedule.transformed_heights(pair, grid, e);
            match route {
                Route::Determinant => super::determinant::ssf_determinant(pair, e, &etas, tolerance),
                Route::Contour => ssf_contour(pair, e, &etas, tolerance),
                other => Err(Error::config(
                    "ssf.route",
                    format!("route `{}` is not a resolvent route", other.as_str()),
                )),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let etas: Vec<f64> = points
        .iter()
        .map(|p| p.etas.last().copied().unwrap_or(0.0) / pair.params.mu_slope(p.energy))
        .collect();
    let mut curve = SsfCurve::with_details(
        energies.to_vec(),
        points.iter().map(|p| p.value).collect(),
        points.iter().map(|p| p.error).collect(),
        etas,
        route,
    )?;
    curve.grid = Some(*grid);
    Ok(curve)
}
