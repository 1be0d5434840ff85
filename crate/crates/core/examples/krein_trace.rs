//! Trace identity `Tr[f(H) - f(H₀)] = -∫ f'(λ) ξ(λ) dλ` on a grid, with
//! the exact staircase as `ξ`, for heat kernels and bumps.

use spectral_shift::operators::{build_free, build_perturbed, Grid, Potential};
use spectral_shift::spectral::{counting_curve, eigenvalues_only, krein_lhs, krein_rhs, TestFunction};

fn main() -> spectral_shift::Result<()> {
    let grid = Grid::line(100.0, 7999)?;
    let h = eigenvalues_only(&build_perturbed(&grid, &Potential::square_well(-4.0, 1.0))?)?;
    let h0 = eigenvalues_only(&build_free(&grid))?;
    let lower = h.min().min(h0.min()) - 1.0;

    let functions = [
        TestFunction::HeatKernel { time: 0.2 },
        TestFunction::HeatKernel { time: 0.5 },
        TestFunction::HeatKernel { time: 1.0 },
        TestFunction::Bump { center: 1.0, half_width: 2.0 },
        TestFunction::Bump { center: 3.0, half_width: 1.5 },
        TestFunction::Gaussian { center: 2.0, width: 0.7 },
    ];
    println!("{:<48} {:>22} {:>22} {:>10}", "f", "Σf(λ_j) - Σf(λ⁰_j)", "-∫ f' ξ", "rel err");
    for f in functions {
        let upper = match f {
            TestFunction::HeatKernel { time } => 30.0 / time,
            _ => 12.0,
        };
        let curve = counting_curve(&h, &h0, lower, upper, (f.scale() / 20.0).min(0.05))?;
        let a = krein_lhs(&h, &h0, &f);
        let b = krein_rhs(&curve, &f)?;
        println!("{:<48} {a:>22.14e} {b:>22.14e} {:>10.2e}", format!("{f:?}"), (a - b).abs() / a.abs());
    }

    // A function living outside the sampled domain cannot be checked.
    let curve = counting_curve(&h, &h0, lower, 5.0, 0.01)?;
    let outside = TestFunction::Bump { center: -10.0, half_width: 1.0 };
    println!("\n{outside:?}: {}", krein_rhs(&curve, &outside).unwrap_err());
    Ok(())
}
