//! Grid Hamiltonians and their spectra: the free stencil against its closed
//! form, bound states of a well, and eigenpair accuracy.

use std::f64::consts::PI;

use spectral_shift::operators::{build_free, build_perturbed, certify_decay, Grid, Potential};
use spectral_shift::spectral::{counting_difference, eigendecompose, eigenvalues_only};

fn main() -> spectral_shift::Result<()> {
    let grid = Grid::line(10.0, 200)?;
    let h = grid.spacing();
    let free = eigenvalues_only(&build_free(&grid))?;
    let worst = free
        .values()
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let exact = 2.0 / (h * h) * (1.0 - ((j + 1) as f64 * PI / 201.0).cos());
            (v - exact).abs() / exact
        })
        .fold(0.0f64, f64::max);
    println!("free stencil: max relative deviation from 2/h²(1 - cos kπ/(N+1)) = {worst:.2e}");
    println!("lowest free level {:.6} vs continuum (π/2L)² = {:.6}", free.min(), (PI / 20.0).powi(2));

    let well = Potential::square_well(-4.0, 1.0);
    let report = certify_decay(&well, 8.0, 1, 4000, 7)?;
    println!("decay certificate for the well: {report:?}");

    let m = build_perturbed(&grid, &well)?;
    let eig = eigendecompose(&m)?;
    let bound: Vec<f64> = eig.values().iter().copied().filter(|&e| e < 0.0).collect();
    println!("bound states on the line: {bound:.5?}");
    println!("max residual ‖Hv - λv‖ = {:.2e} (‖H‖ ≈ {:.1})", eig.max_residual(&m), m.norm_bound());
    for e in [-3.0, -1.0, 0.5, 2.0] {
        println!("N_H - N_H0 at λ = {e:>4}: {}", counting_difference(&eig, &free, e)?);
    }

    // Radial channels carry the centrifugal barrier on the diagonal.
    for l in 0..3 {
        let g = Grid::radial(20.0, 1999, l)?;
        let e = eigenvalues_only(&build_perturbed(&g, &well)?)?;
        let n = e.values().iter().filter(|&&v| v < 0.0).count();
        println!("radial l = {l}: {n} bound state(s), lowest {:.5}", e.min());
    }
    Ok(())
}
