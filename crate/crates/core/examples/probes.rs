//! Operator-level probes: singular-value sums of the weighted difference
//! `W` under grid refinement, and weighted resolvent products as `η → 0`.

use spectral_shift::operators::{build_free, build_perturbed, certify_decay, DecayCertificate, Grid, Potential};
use spectral_shift::spectral::eigendecompose;
use spectral_shift::ssf::{beta_window, boundary_limit_probe, w_trace_probe, TransformParams};

fn main() -> spectral_shift::Result<()> {
    // The admissible β window comes from the certified decay |V| ≤ C⟨x⟩^-α.
    let bare = Potential::gaussian(-1.0, 1.0);
    let alpha = 8.0;
    let decay = certify_decay(&bare, alpha, 1, 4000, 7)?;
    let v = bare.with_certificate(DecayCertificate { alpha, constant: decay.c_fit });
    let (lo, hi) = beta_window(&v, 1)?;
    let beta = 0.5 * (lo + hi);
    println!("β window ({lo}, {hi}); using the midpoint {beta}");

    let params = TransformParams::default_for(-v.max_abs());
    let grids = [99, 199, 399, 799]
        .iter()
        .map(|&n| Grid::line(10.0, n))
        .collect::<spectral_shift::Result<Vec<_>>>()?;
    let w = w_trace_probe(&grids, &v, &params, beta)?;
    for (n, s) in w.points.iter().zip(&w.sums) {
        println!("N = {n:>4}: Σ σ_j(W) = {s:.10}");
    }
    let diffs: Vec<String> = w.differences.iter().map(|d| format!("{d:.3e}")).collect();
    println!("differences [{}]; Cauchy at 2%: {}", diffs.join(", "), w.is_cauchy(0.02));

    let g = Grid::line(10.0, 399)?;
    let h = eigendecompose(&build_perturbed(&g, &v)?)?;
    let h0 = eigendecompose(&build_free(&g))?;
    let etas: Vec<f64> = (0..7).map(|j| 0.1 / 2f64.powi(j)).collect();
    let b = boundary_limit_probe(&h, &h0, &TransformParams::default_for(h.min()), 1.0, beta, &etas)?;
    for (eta, n) in b.etas.iter().zip(&b.norms) {
        println!("η = {eta:.5}: ‖⟨x⟩^-β R₀ R ⟨x⟩^-β‖ = {n:.8}");
    }
    println!("smallest contraction of successive differences: {:.3}", b.min_contraction());

    match w_trace_probe(&grids, &v, &params, hi + 1.0) {
        Err(e) => println!("β outside the window: {e}"),
        Ok(_) => println!("β outside the window accepted"),
    }
    Ok(())
}
