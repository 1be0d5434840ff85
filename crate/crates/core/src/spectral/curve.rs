use serde::{Deserialize, Serialize};

use super::{counting_difference, EigenSystem};
use crate::error::{Error, Result};
use crate::operators::Grid;

/// Which construction produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Contour,
    Determinant,
    Counting,
    Phase,
    Excess,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Contour => "contour",
            Route::Determinant => "determinant",
            Route::Counting => "counting",
            Route::Phase => "phase",
            Route::Excess => "excess",
        }
    }
}

/// Sampled spectral shift function `ξ(λ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsfCurve {
    pub energies: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Smoothing height used per sample; zero for exact boundary values.
    pub etas: Vec<f64>,
    pub route: Route,
    /// Interval indices `i` such that the curve jumps between samples `i`
    /// and `i + 1`. Quadrature does not interpolate across these.
    pub breaks: Vec<usize>,
    pub grid: Option<Grid>,
}

impl SsfCurve {
    pub fn new(energies: Vec<f64>, values: Vec<f64>, route: Route) -> Result<Self> {
        let n = energies.len();
        Self::with_details(energies, values, vec![0.0; n], vec![0.0; n], route)
    }

    pub fn with_details(
        energies: Vec<f64>,
        values: Vec<f64>,
        errors: Vec<f64>,
        etas: Vec<f64>,
        route: Route,
    ) -> Result<Self> {
        let n = energies.len();
        if n < 2 || values.len() != n || errors.len() != n || etas.len() != n {
            return Err(Error::DomainCoverage(format!(
                "curve needs ≥ 2 samples with matching columns (got {n})"
            )));
        }
        if energies.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::DomainCoverage("energy grid must be strictly increasing".into()));
        }
        if values.iter().chain(&energies).any(|v| !v.is_finite()) {
            return Err(Error::DomainCoverage("curve samples must be finite".into()));
        }
        Ok(Self {
            energies,
            values,
            errors,
            etas,
            route,
            breaks: Vec::new(),
            grid: None,
        })
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.energies[0], self.energies[self.len() - 1])
    }

    /// Contiguous index ranges not crossing a break.
    pub fn segments(&self) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for &b in &self.breaks {
            out.push(start..b + 1);
            start = b + 1;
        }
        out.push(start..self.len());
        out
    }
}

/// Exact counting-difference staircase on `[lo, hi]`.
///
/// Samples sit strictly between consecutive eigenvalues of either operator,
/// spaced at most `max_step` apart, and each eigenvalue is bracketed by a
/// break interval narrower than `2 ε` with `ε = 1e-10 ‖H‖`.
pub fn counting_curve(
    eig_h: &EigenSystem,
    eig_h0: &EigenSystem,
    lo: f64,
    hi: f64,
    max_step: f64,
) -> Result<SsfCurve> {
    if !(hi > lo) || !(max_step > 0.0) {
        return Err(Error::DomainCoverage(format!("bad counting interval [{lo}, {hi}]")));
    }
    let eps = 1e-10 * eig_h.norm().max(eig_h0.norm()).max(1.0);
    let mut cuts: Vec<f64> = eig_h
        .values()
        .iter()
        .chain(eig_h0.values())
        .copied()
        .filter(|&v| v > lo + eps && v < hi - eps)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 4.0 * eps);

    let mut edges = vec![lo];
    for c in &cuts {
        edges.push(c - eps);
        edges.push(c + eps);
    }
    edges.push(hi);

    let mut energies = Vec::new();
    let mut breaks = Vec::new();
    for (k, pair) in edges.chunks(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        if k > 0 {
            breaks.push(energies.len() - 1);
        }
        let mut intervals = ((b - a) / max_step).ceil().max(2.0) as usize;
        if intervals % 2 == 1 {
            intervals += 1;
        }
        for i in 0..=intervals {
            energies.push(a + (b - a) * i as f64 / intervals as f64);
        }
    }
    let values = energies
        .iter()
        .map(|&e| counting_difference(eig_h, eig_h0, e).map(|c| c as f64))
        .collect::<Result<Vec<_>>>()?;
    let n = energies.len();
    let mut curve = SsfCurve::with_details(energies, values, vec![0.0; n], vec![0.0; n], Route::Counting)?;
    curve.breaks = breaks;
    curve.grid = Some(*eig_h.grid());
    Ok(curve)
}

/// Composite Simpson rule on an arbitrary increasing grid.
pub fn simpson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * (x[1] - x[0]) * (y[0] + y[1]),
        _ => {
            let mut total = 0.0;
            let mut i = 0;
            while i + 2 < n {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                let hs = h0 + h1;
                total += hs / 6.0
                    * ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
                i += 2;
            }
            if i + 1 < n {
                // Odd interval count: close with the quadratic through the
                // last three samples over the final interval.
                let (x0, x1, x2) = (x[n - 3], x[n - 2], x[n - 1]);
                let h0 = x1 - x0;
                let h1 = x2 - x1;
                total += y[n - 1] * (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1))
                    + y[n - 2] * (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0)
                    - y[n - 3] * h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_for_quadratics_on_uneven_grids() {
        let x = [0.0, 0.3, 0.35, 1.0, 1.7, 2.0];
        let f = |t: f64| 1.0 - 2.0 * t + 0.75 * t * t;
        let y: Vec<f64> = x.iter().map(|&t| f(t)).collect();
        let exact = 2.0 - 4.0 + 2.0;
        assert!((simpson(&x, &y) - exact).abs() < 1e-12);
        let x4 = [0.0, 0.3, 0.7, 1.2, 2.0];
        let y4: Vec<f64> = x4.iter().map(|&t| 1.0 + t * t).collect();
        assert!((simpson(&x4, &y4) - (2.0 + 8.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted_energy_grids() {
        assert!(SsfCurve::new(vec![0.0, 0.0], vec![1.0, 1.0], Route::Counting).is_err());
        assert!(SsfCurve::new(vec![1.0, 0.0], vec![1.0, 1.0], Route::Counting).is_err());
    }

    #[test]
    fn segments_split_at_breaks() {
        let mut c = SsfCurve::new((0..6).map(|i| i as f64).collect(), vec![0.0; 6], Route::Counting).unwrap();
        c.breaks = vec![2];
        assert_eq!(c.segments(), vec![0..3, 3..6]);
    }
}
