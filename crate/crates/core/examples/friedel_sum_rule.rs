//! θ(λ), ξ(λ) and Z(λ) side by side for a gaussian well on the line.

use spectral_shift::excess::{excess_at, CutoffProfile, ExcessTable};
use spectral_shift::operators::{build_free, build_perturbed, Grid, Potential};
use spectral_shift::scattering::{momentum_grid, phase_curve, total_phase_1d, Channel, PhaseOptions};
use spectral_shift::spectral::{eigendecompose_below, EigenSystem};
use spectral_shift::ssf::{ssf_contour, EtaSchedule, TransformParams, TransformedPair};

fn main() -> spectral_shift::Result<()> {
    let grid = Grid::line(100.0, 8000)?;
    let potential = Potential::gaussian(-1.0, 1.0);
    let energies: Vec<f64> = (0..8).map(|i| 0.25 + 3.75 * i as f64 / 7.0).collect();
    let ceiling = 2.0 * 4.0 + 2.0;

    let t = std::time::Instant::now();
    let h: EigenSystem = eigendecompose_below(&build_perturbed(&grid, &potential)?, ceiling)?;
    let h0 = eigendecompose_below(&build_free(&grid), ceiling)?;
    println!("eigensystems: {:?} ({} / {} vectors)", t.elapsed(), h.vector_count(), h0.vector_count());

    let params = TransformParams::default_for(h.min());
    let pair = TransformedPair::new(&h, &h0, params)?;
    let schedule = EtaSchedule::level_spacing_default();
    let radii = [5.0, 10.0, 20.0, 40.0];
    let profiles: Vec<CutoffProfile> = radii.iter().map(|&r| CutoffProfile::new(r)).collect();
    let table = ExcessTable::new(&h, &h0, params, &profiles)?;

    let ks: Vec<f64> = energies.iter().map(|e| e.sqrt()).collect();
    let kgrid = momentum_grid(0.01, 20.0, 0.5, 40, 0.05, &ks);
    let opts = PhaseOptions::default();
    let even = phase_curve(&potential, Channel::Even, &kgrid, &opts)?;
    let odd = phase_curve(&potential, Channel::Odd, &kgrid, &opts)?;
    let theta = total_phase_1d(&even, &odd, &energies)?;

    println!("{:>8} {:>12} {:>12} {:>12} {:>10} {:>10}", "lambda", "theta", "xi", "Z_inf", "xi_err", "eps");
    for (i, &e) in energies.iter().enumerate() {
        let etas = schedule.transformed_heights(&pair, &grid, e);
        let xi = ssf_contour(&pair, e, &etas, 1.0)?;
        let z = excess_at(&table, e, &etas, 0.01)?;
        println!(
            "{:>8.4} {:>12.6} {:>12.6} {:>12.6} {:>10.2e} {:>10.3}   Z_R = {:?}",
            e, theta.values[i], xi.value, z.fit.limit, xi.error, z.fit.exponent, z.values
        );
    }
    println!("total: {:?}", t.elapsed());
    Ok(())
}
