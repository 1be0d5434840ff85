//! Same boundary values from different admissible transforms
//! `μ(λ) = (λ + M)^{-ℓ}`.

use spectral_shift::operators::{build_free, build_perturbed, Grid, Potential};
use spectral_shift::spectral::eigenvalues_only;
use spectral_shift::ssf::{ssf_contour, EtaSchedule, TransformParams, TransformedPair};

fn main() -> spectral_shift::Result<()> {
    let grid = Grid::line(20.0, 2000)?;
    let h = eigenvalues_only(&build_perturbed(&grid, &Potential::gaussian(-1.0, 1.0))?)?;
    let h0 = eigenvalues_only(&build_free(&grid))?;
    let choices = [(2.0, 1), (3.0, 2), (5.0, 1), (1.6, 3)];
    let pairs = choices
        .iter()
        .map(|&(m, l)| TransformedPair::new(&h, &h0, TransformParams::new(m, l)))
        .collect::<spectral_shift::Result<Vec<_>>>()?;
    let schedule = EtaSchedule::gap_default();

    print!("{:>8}", "lambda");
    for (m, l) in choices {
        print!(" {:>16}", format!("M={m}, ℓ={l}"));
    }
    println!(" {:>10}", "spread");
    for i in 0..10 {
        let e = -0.33 + 0.47 * i as f64;
        let values = pairs
            .iter()
            .map(|p| ssf_contour(p, e, &schedule.transformed_heights(p, &grid, e), 1e-3).map(|x| x.value))
            .collect::<spectral_shift::Result<Vec<_>>>()?;
        let spread = values.iter().fold(f64::MIN, |a, &b| a.max(b)) - values.iter().fold(f64::MAX, |a, &b| a.min(b));
        print!("{e:>8.3}");
        values.iter().for_each(|v| print!(" {v:>16.10}"));
        println!(" {spread:>10.1e}");
    }

    // Shifts that leave part of the spectrum unmapped are refused.
    match TransformedPair::new(&h, &h0, TransformParams::new(1.2, 1)) {
        Err(e) => println!("\nM = 1.2: {e}"),
        Ok(_) => println!("\nM = 1.2 accepted"),
    }
    Ok(())
}
