//! Cutoff excess charge `Z_R(λ)` on a radius ladder, its `R → ∞` fit, and
//! the same limit from a second cutoff profile and a doubled box.

use spectral_shift::excess::{excess_at, excess_charge_r, cutoff_weights, CutoffProfile, ExcessTable};
use spectral_shift::operators::{build_free, build_perturbed, Grid, Potential};
use spectral_shift::spectral::{eigendecompose_below, EigenSystem};
use spectral_shift::ssf::{EtaSchedule, TransformParams, TransformedPair};

struct Setup {
    grid: Grid,
    h: EigenSystem,
    h0: EigenSystem,
    params: TransformParams,
}

fn setup(half_width: f64, points: usize) -> spectral_shift::Result<Setup> {
    let grid = Grid::line(half_width, points)?;
    let v = Potential::gaussian(-1.0, 1.0);
    let h = eigendecompose_below(&build_perturbed(&grid, &v)?, 6.0)?;
    let h0 = eigendecompose_below(&build_free(&grid), 6.0)?;
    let params = TransformParams::default_for(h.min());
    Ok(Setup { grid, h, h0, params })
}

fn limit(s: &Setup, energy: f64, plateau: f64) -> spectral_shift::Result<()> {
    let radii = [5.0, 10.0, 20.0, 40.0];
    let profiles: Vec<_> = radii.iter().map(|&r| CutoffProfile::new(r).with_plateau(plateau)).collect();
    let table = ExcessTable::new(&s.h, &s.h0, s.params, &profiles)?;
    let pair = TransformedPair::new(&s.h, &s.h0, s.params)?;
    let etas = EtaSchedule::level_spacing_default().transformed_heights(&pair, &s.grid, energy);
    let z = excess_at(&table, energy, &etas, 0.01)?;
    println!(
        "λ = {energy:>4}, L = {:>5}, plateau {plateau}: Z_R = {:.5?} -> Z_∞ = {:.5} (ε̂ = {:.3}, residual {:.1e})",
        s.grid.half_width(),
        z.values,
        z.fit.limit,
        z.fit.exponent,
        z.fit.residual
    );
    Ok(())
}

fn main() -> spectral_shift::Result<()> {
    let energy = 1.0;
    let base = setup(100.0, 8000)?;

    // The raw finite-box trace jumps by whole eigenvalues as λ moves.
    let w = cutoff_weights(&base.grid, &CutoffProfile::new(20.0))?;
    for e in [0.98, 0.99, 1.0, 1.01, 1.02] {
        println!("unsmoothed Z_20({e}) = {:.5}", excess_charge_r(&base.h, &base.h0, e, &w)?);
    }
    println!();
    limit(&base, energy, 0.5)?;
    limit(&base, energy, 0.3)?;
    limit(&setup(200.0, 16001)?, energy, 0.5)?;

    // Below the continuum only the bound state contributes: Z_R reaches
    // the count exponentially fast and the fitted exponent hits its cap.
    limit(&base, -0.1, 0.5)
}
