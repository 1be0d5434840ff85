use super::{simpson, EigenSystem, Side, SsfCurve, TestFunction};
use crate::error::{Error, Result};

/// Relative size of `|f'|` treated as outside the support.
const SUPPORT_CUT: f64 = 1e-10;

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `Σ f(λ_j(H)) − Σ f(λ_j(H₀))`.
pub fn krein_lhs(eig_h: &EigenSystem, eig_h0: &EigenSystem, f: &TestFunction) -> f64 {
    compensated_sum(
        eig_h
            .values()
            .iter()
            .map(|&v| f.value(v))
            .chain(eig_h0.values().iter().map(|&v| -f.value(v))),
    )
}

/// `−∫ f'(λ) ξ(λ) dλ` by composite Simpson on the curve's own grid.
///
/// Outside its domain the curve is taken to be zero, which is only allowed
/// at an end where the sampled value is already zero; otherwise `f'` must
/// vanish beyond that end.
pub fn krein_rhs(curve: &SsfCurve, f: &TestFunction) -> Result<f64> {
    let (lo, hi) = curve.domain();
    let n = curve.len();
    let fprime: Vec<f64> = curve.energies.iter().map(|&e| f.derivative(e)).collect();
    let peak = fprime.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = SUPPORT_CUT * peak.max(f64::MIN_POSITIVE);
    let outside = [f.derivative_tail(lo, Side::Below), f.derivative_tail(hi, Side::Above)]
        .into_iter()
        .filter(|t| t.is_finite())
        .fold(0.0f64, f64::max);
    if peak == 0.0 || peak <= SUPPORT_CUT * outside {
        return Err(Error::DomainCoverage(format!(
            "f' is supported outside the curve domain [{lo}, {hi}]"
        )));
    }

    for (end, value, side) in [(lo, curve.values[0], Side::Below), (hi, curve.values[n - 1], Side::Above)] {
        if value.abs() > 1e-12 && f.derivative_tail(end, side) > floor {
            return Err(Error::DomainCoverage(format!(
                "f' does not vanish beyond the curve end λ = {end} where ξ = {value}"
            )));
        }
    }

    let breaks: std::collections::HashSet<usize> = curve.breaks.iter().copied().collect();
    let max_step = f.scale() / 20.0;
    for i in 0..n - 1 {
        if breaks.contains(&i) {
            continue;
        }
        let width = curve.energies[i + 1] - curve.energies[i];
        if width > max_step * (1.0 + 1e-9) && fprime[i].abs().max(fprime[i + 1].abs()) > floor {
            return Err(Error::DomainCoverage(format!(
                "grid step {width:e} near λ = {} exceeds {max_step:e} (20 samples per scale of f')",
                curve.energies[i]
            )));
        }
    }

    let integrand: Vec<f64> = fprime.iter().zip(&curve.values).map(|(d, x)| -d * x).collect();
    let mut total = compensated_sum(
        curve
            .segments()
            .into_iter()
            .map(|r| simpson(&curve.energies[r.clone()], &integrand[r])),
    );
    for &b in &curve.breaks {
        let w = curve.energies[b + 1] - curve.energies[b];
        total += 0.5 * w * (integrand[b] + integrand[b + 1]);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_free, build_perturbed, Grid, Potential};
    use crate::spectral::{counting_curve, eigenvalues_only, Route};

    #[test]
    fn zero_curve_gives_zero() {
        let e: Vec<f64> = (0..201).map(|i| -5.0 + 0.05 * i as f64).collect();
        let c = SsfCurve::new(e, vec![0.0; 201], Route::Counting).unwrap();
        let f = TestFunction::HeatKernel { time: 0.5 };
        assert_eq!(krein_rhs(&c, &f).unwrap(), 0.0);
    }

    #[test]
    fn unit_curve_integrates_derivative() {
        let e: Vec<f64> = (0..=400).map(|i| -2.0 + 0.01 * i as f64).collect();
        let c = SsfCurve::new(e, vec![1.0; 401], Route::Counting).unwrap();
        let f = TestFunction::Gaussian { center: 0.0, width: 0.2 };
        let rhs = krein_rhs(&c, &f).unwrap();
        assert!((rhs - (f.value(-2.0) - f.value(2.0))).abs() < 1e-9);
    }

    #[test]
    fn identical_systems_and_constants() {
        let g = Grid::line(10.0, 200).unwrap();
        let h0 = eigenvalues_only(&build_free(&g)).unwrap();
        let f = TestFunction::HeatKernel { time: 0.5 };
        assert_eq!(krein_lhs(&h0, &h0, &f), 0.0);
        let flat = TestFunction::HeatKernel { time: 0.0 };
        let h = eigenvalues_only(&build_perturbed(&g, &Potential::gaussian(-1.0, 1.0)).unwrap()).unwrap();
        assert_eq!(krein_lhs(&h, &h0, &flat), 0.0);
    }

    #[test]
    fn counting_staircase_reproduces_trace() {
        let g = Grid::line(20.0, 2000).unwrap();
        let h0 = eigenvalues_only(&build_free(&g)).unwrap();
        let h = eigenvalues_only(&build_perturbed(&g, &Potential::square_well(-2.0, 1.0)).unwrap()).unwrap();
        let f = TestFunction::HeatKernel { time: 0.5 };
        let lhs = krein_lhs(&h, &h0, &f);
        let curve = counting_curve(&h, &h0, h.min() - 1.0, 120.0, 0.05).unwrap();
        let rhs = krein_rhs(&curve, &f).unwrap();
        assert!((lhs - rhs).abs() <= 1e-6 * lhs.abs(), "lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn support_below_domain_is_rejected() {
        let g = Grid::line(20.0, 800).unwrap();
        let h0 = eigenvalues_only(&build_free(&g)).unwrap();
        let h = eigenvalues_only(&build_perturbed(&g, &Potential::square_well(-2.0, 1.0)).unwrap()).unwrap();
        let curve = counting_curve(&h, &h0, 0.2, 5.0, 0.005).unwrap();
        // ξ(0.2) counts the bound state, so nothing below 0.2 may be dropped.
        let below = TestFunction::Bump { center: -2.0, half_width: 1.0 };
        let straddling = TestFunction::Bump { center: 0.0, half_width: 1.0 };
        let inside = TestFunction::Bump { center: 2.5, half_width: 1.0 };
        assert!(matches!(krein_rhs(&curve, &below), Err(Error::DomainCoverage(_))));
        assert!(matches!(krein_rhs(&curve, &straddling), Err(Error::DomainCoverage(_))));
        assert!(krein_rhs(&curve, &inside).is_ok());
    }

    #[test]
    fn support_outside_a_zero_curve_is_rejected() {
        let e: Vec<f64> = (0..201).map(|i| -1.0 + 0.01 * i as f64).collect();
        let c = SsfCurve::new(e, vec![0.0; 201], Route::Counting).unwrap();
        for f in [
            TestFunction::Bump { center: -5.0, half_width: 1.0 },
            TestFunction::Gaussian { center: 30.0, width: 0.5 },
        ] {
            assert!(matches!(krein_rhs(&c, &f), Err(Error::DomainCoverage(_))), "{f:?}");
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let e: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let c = SsfCurve::new(e, vec![0.0; 11], Route::Counting).unwrap();
        let f = TestFunction::Gaussian { center: 5.0, width: 1.0 };
        assert!(matches!(krein_rhs(&c, &f), Err(Error::DomainCoverage(_))));
    }
}
