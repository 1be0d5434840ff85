use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

use super::contour::{finish, Contour, SsfPoint};
use super::transform::TransformedPair;
use crate::error::{Error, Result};

const MAX_BISECTIONS: u32 = 48;

/// Phase of `Δ(z₁)/Δ(z₀)` as a product of unit phasors, so the modulus never
/// overflows however many factors there are.
fn phase_increment(pair: &TransformedPair, z0: Complex64, z1: Complex64) -> f64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for (&a, &a0) in pair.perturbed.iter().zip(&pair.free) {
        if a == a0 {
            continue;
        }
        let f = (a - z1) / (a - z0) * ((a0 - z0) / (a0 - z1));
        let n = f.norm();
        if n > 0.0 {
            acc *= f / n;
        }
    }
    acc.arg()
}

/// `Re log Δ(z) = Σ_j ln|a_j - z| - ln|a⁰_j - z|`.
fn log_modulus(pair: &TransformedPair, z: Complex64) -> f64 {
    pair.perturbed
        .iter()
        .zip(&pair.free)
        .filter(|(a, a0)| a != a0)
        .map(|(&a, &a0)| ((a - z).norm() / (a0 - z).norm()).ln())
        .sum()
}

fn advance(pair: &TransformedPair, z0: Complex64, z1: Complex64, depth: u32) -> Result<f64> {
    let inc = phase_increment(pair, z0, z1);
    if inc.abs() < FRAC_PI_2 {
        return Ok(inc);
    }
    if depth >= MAX_BISECTIONS {
        return Err(Error::PathRefinement { jump: inc });
    }
    let mid = 0.5 * (z0 + z1);
    Ok(advance(pair, z0, mid, depth + 1)? + advance(pair, mid, z1, depth + 1)?)
}

/// Continuous branch of `log Δ(z)`, `Δ(z) = det[(A - z)(A₀ - z)^{-1}]`,
/// carried along `path` from its real start point, where `Δ > 0`, to its
/// end. Steps are bisected until each phase increment is below `π/2`.
pub fn log_perturbation_determinant(pair: &TransformedPair, path: &Contour) -> Result<Complex64> {
    let start = path.nodes[0];
    if start.im != 0.0 || start.re <= pair.perturbed[0].max(pair.free[0]) {
        return Err(Error::DomainCoverage(format!(
            "path must start on the real axis above both spectra (got {start})"
        )));
    }
    for &w in &path.nodes {
        let d = pair.distance_to_poles(w);
        if d < 1e-14 {
            return Err(Error::PoleProximity {
                point: format!("{w}"),
                distance: d,
            });
        }
    }
    let mut phase = 0.0;
    for w in path.nodes.windows(2) {
        phase += advance(pair, w[0], w[1], 0)?;
    }
    let end = *path.nodes.last().expect("contour has nodes");
    Ok(Complex64::new(log_modulus(pair, end), phase))
}

/// `ξ_η(λ; H, H₀) = (1/π) Im log Δ(μ(λ) + iη)` for one height.
pub fn ssf_determinant_at(pair: &TransformedPair, energy: f64, eta: f64) -> Result<f64> {
    let contour = Contour::new(pair, pair.params.mu(energy), eta)?;
    Ok(log_perturbation_determinant(pair, &contour)?.im / PI)
}

/// Determinant-route counterpart of [`super::ssf_contour`].
pub fn ssf_determinant(pair: &TransformedPair, energy: f64, etas: &[f64], tolerance: f64) -> Result<SsfPoint> {
    let raw = etas
        .iter()
        .map(|&eta| ssf_determinant_at(pair, energy, eta))
        .collect::<Result<Vec<_>>>()?;
    finish(energy, etas, raw, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_free, build_perturbed, Grid, Potential};
    use crate::spectral::eigenvalues_only;
    use crate::ssf::{ssf_contour_at, TransformParams};

    fn pair() -> TransformedPair {
        let g = Grid::line(8.0, 160).unwrap();
        let h0 = eigenvalues_only(&build_free(&g)).unwrap();
        let h = eigenvalues_only(&build_perturbed(&g, &Potential::gaussian(-2.0, 1.0)).unwrap()).unwrap();
        TransformedPair::new(&h, &h0, TransformParams::default_for(h.min())).unwrap()
    }

    #[test]
    fn real_point_above_spectra_is_real() {
        let p = pair();
        let w0 = p.contour_start();
        let path = Contour {
            start: w0,
            end: Complex64::new(w0 + 0.5, 0.0),
            eta: 0.0,
            nodes: vec![Complex64::new(w0, 0.0), Complex64::new(w0 + 0.5, 0.0)],
        };
        let v = log_perturbation_determinant(&p, &path).unwrap();
        assert_eq!(v.im, 0.0);
        assert!(v.re.is_finite());
    }

    #[test]
    fn matches_the_contour_route() {
        let p = pair();
        for &(e, eta) in &[(0.4, 1e-2), (1.5, 3e-3), (3.0, 1e-4), (-0.3, 1e-3)] {
            let a = ssf_determinant_at(&p, e, eta).unwrap();
            let b = ssf_contour_at(&p, e, eta).unwrap();
            assert!((a - b).abs() < 1e-9, "λ = {e}, η = {eta}: {a} vs {b}");
        }
    }

    #[test]
    fn identical_systems_give_zero() {
        let g = Grid::line(8.0, 100).unwrap();
        let h0 = eigenvalues_only(&build_free(&g)).unwrap();
        let p = TransformedPair::new(&h0, &h0, TransformParams::new(2.0, 1)).unwrap();
        let c = Contour::new(&p, p.params.mu(1.0), 1e-3).unwrap();
        assert_eq!(log_perturbation_determinant(&p, &c).unwrap(), Complex64::new(0.0, 0.0));
    }
}
