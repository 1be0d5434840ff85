//! The spectral shift function by the resolvent-contour route and the
//! perturbation-determinant route, with the η → 0 sweep made visible.

use spectral_shift::operators::{build_free, build_perturbed, Grid, Potential};
use spectral_shift::spectral::{counting_difference, eigenvalues_only};
use spectral_shift::ssf::{
    ssf_contour, ssf_contour_at, ssf_determinant, ssf_determinant_at, EtaSchedule, TransformParams, TransformedPair,
};

fn main() -> spectral_shift::Result<()> {
    let grid = Grid::line(20.0, 2000)?;
    let v = Potential::gaussian(-1.0, 1.0);
    let h = eigenvalues_only(&build_perturbed(&grid, &v)?)?;
    let h0 = eigenvalues_only(&build_free(&grid))?;
    let params = TransformParams::default_for(h.min());
    println!("transform: M = {}, ℓ = {}; lowest level {:.6}", params.shift, params.power, h.min());
    let pair = TransformedPair::new(&h, &h0, params)?;

    // Smoothed values at one energy: both routes at each height.
    let e = 1.3;
    println!("\nη sweep at λ = {e}");
    println!("{:>12} {:>20} {:>20} {:>10}", "eta", "contour", "determinant", "gap");
    for k in 0..6 {
        let eta = 0.05 / 2f64.powi(k) * params.mu_slope(e);
        let a = ssf_contour_at(&pair, e, eta)?;
        let b = ssf_determinant_at(&pair, e, eta)?;
        println!("{eta:>12.3e} {a:>20.12} {b:>20.12} {:>10.1e}", (a - b).abs());
    }

    // Boundary values with heights tied to the spectral gap recover the
    // finite-grid staircase.
    let schedule = EtaSchedule::gap_default();
    println!("\n{:>8} {:>14} {:>14} {:>8} {:>10}", "lambda", "contour", "determinant", "N - N0", "error");
    for e in [-0.4, 0.2, 0.9, 1.7, 3.1] {
        let etas = schedule.transformed_heights(&pair, &grid, e);
        let c = ssf_contour(&pair, e, &etas, 1e-3)?;
        let d = ssf_determinant(&pair, e, &etas, 1e-3)?;
        let n = counting_difference(&h, &h0, e)?;
        println!("{e:>8.3} {:>14.9} {:>14.9} {n:>8} {:>10.1e}", c.value, d.value, c.error);
    }
    Ok(())
}
