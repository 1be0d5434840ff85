//! Partial-wave phase shifts: the square-well closed form, fourth-order
//! convergence, Levinson counts, and total phases on the line and in 3D.

use std::f64::consts::PI;

use spectral_shift::operators::{build_perturbed, Grid, Potential};
use spectral_shift::scattering::{
    l_max_policy, levinson_check, momentum_grid, phase_curve, phase_shift_radial, principal, total_phase_1d,
    total_phase_3d, Channel, PhaseOptions,
};
use spectral_shift::spectral::eigenvalues_only;

fn main() -> spectral_shift::Result<()> {
    let well = Potential::square_well(-4.0, 1.0);
    let opts = PhaseOptions::default();

    println!("{:>6} {:>14} {:>14} {:>10}", "k", "numerov", "closed form", "diff");
    for k in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let kp = (k * k + 4.0f64).sqrt();
        let exact = principal(-k + ((k / kp) * kp.tan()).atan());
        let d = phase_shift_radial(&well, 0, k, &opts)?;
        println!("{k:>6} {d:>14.10} {exact:>14.10} {:>10.1e}", principal(d - exact).abs());
    }

    let at = |step: f64| {
        let o = PhaseOptions { step: Some(step), matching_radius: Some(8.0) };
        phase_shift_radial(&well, 0, 2.0, &o)
    };
    let (a, b, c) = (at(0.1)?, at(0.05)?, at(0.025)?);
    println!("\nstep halving at k = 2: ratio {:.2}", (a - b) / (b - c));

    let energies = [0.5f64, 1.0, 2.0, 4.0];
    let on_grid: Vec<f64> = energies.iter().map(|e| e.sqrt()).collect();
    let ks = momentum_grid(0.01, 30.0, 0.5, 40, 0.05, &on_grid);
    println!();
    let mut channels = Vec::new();
    for l in 0..12 {
        let g = Grid::radial(40.0, 3999, l)?;
        let bound = eigenvalues_only(&build_perturbed(&g, &well)?)?.values().iter().filter(|&&e| e < 0.0).count();
        let curve = phase_curve(&well, Channel::Radial { l }, &ks, &opts)?;
        if l < 3 {
            let lev = levinson_check(&curve, bound);
            println!(
                "l = {l}: δ(0.01) = {:.4}, expected {:.4} ({bound} bound), pass {}",
                lev.observed, lev.expected, lev.pass
            );
        }
        channels.push(curve);
    }
    let k_top = energies.iter().fold(0.0f64, |m, e| m.max(e.sqrt()));
    println!("ℓ_max at k = {k_top}: {}", l_max_policy(k_top, 1.0));
    let theta = total_phase_3d(&channels, &energies, 1e-3)?;
    for (i, e) in energies.iter().enumerate() {
        println!("3D θ({e}) = {:.6} (tail bound {:.1e})", theta.values[i], theta.tail_bounds[i]);
    }

    let gauss = Potential::gaussian(-1.0, 1.0);
    let even = phase_curve(&gauss, Channel::Even, &ks, &opts)?;
    let odd = phase_curve(&gauss, Channel::Odd, &ks, &opts)?;
    let line = total_phase_1d(&even, &odd, &energies)?;
    println!("\nline gaussian: δ_even(0.01) = {:.4} (one even bound state: π/2 = {:.4})", even.phases[0], PI / 2.0);
    for (i, e) in energies.iter().enumerate() {
        println!("1D θ({e}) = {:.6}", line.values[i]);
    }
    Ok(())
}
