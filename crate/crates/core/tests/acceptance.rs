//! Acceptance criteria 1-10 at their pinned tolerances. Each criterion
//! prints one PASS/FAIL line; the test fails if any criterion fails.

use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

use spectral_shift::config::{preset, EnergySpec};
use spectral_shift::experiment::{Experiment, RunReport};
use spectral_shift::operators::{build_free, build_perturbed, Grid, Potential};
use spectral_shift::scattering::{
    levinson_check, momentum_grid, phase_curve, phase_shift_radial, principal, Channel, PhaseOptions,
};
use spectral_shift::spectral::eigenvalues_only;
use spectral_shift::ssf::{ssf_contour, EtaSchedule, TransformParams, TransformedPair};

struct Line {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Bypasses the test harness capture so the lines land in the log.
fn emit(line: &Line) {
    let text = format!(
        "criterion {:>2} {} {}: {}\n",
        line.id,
        if line.pass { "PASS" } else { "FAIL" },
        line.name,
        line.detail
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

fn check_line(report: &RunReport, name: &str) -> (bool, f64, f64) {
    let c = report.check(name).unwrap_or_else(|| panic!("missing check {name}"));
    (c.pass, c.observed, c.tolerance)
}

fn stone_and_routes(lines: &mut Vec<Line>) {
    let t = Instant::now();
    let exp = Experiment::new(preset("stone").unwrap()).unwrap();
    let report = exp.run_ssf().unwrap();
    let elapsed = t.elapsed();
    let time_ok = within(Duration::from_secs(60), elapsed);

    // Independent staircase: count grid eigenvalues directly.
    let g = exp.config.grid(0).unwrap();
    let h = eigenvalues_only(&build_perturbed(&g, &exp.potential).unwrap()).unwrap();
    let h0 = eigenvalues_only(&build_free(&g)).unwrap();
    let count = |v: &[f64], e: f64| v.iter().filter(|&&x| x <= e).count() as f64;
    let mut worst = 0.0f64;
    let mut points = 0;
    for row in &report.rows {
        let xi = row.xi_contour.expect("contour value");
        let exact = count(h.values(), row.lambda) - count(h0.values(), row.lambda);
        worst = worst.max((xi - exact).abs());
        points += 1;
    }
    lines.push(Line {
        id: 1,
        name: "discrete Stone consistency",
        pass: worst < 1e-6 && points == 20 && time_ok,
        detail: format!("max |ξ - ΔN| = {worst:.3e} over {points} energies (< 1e-6), {elapsed:.1?} (≤ 60 s)"),
    });

    let (ok, gap, tol) = check_line(&report, "route-equivalence");
    lines.push(Line {
        id: 2,
        name: "route equivalence",
        pass: ok && gap <= 1e-8 && tol <= 1e-8 && time_ok,
        detail: format!("max |contour - determinant| = {gap:.3e} at every (λ, η) (≤ 1e-8), {elapsed:.1?} (≤ 60 s)"),
    });
}

fn invariance(lines: &mut Vec<Line>) {
    let g = Grid::line(20.0, 2000).unwrap();
    let v = Potential::gaussian(-1.0, 1.0);
    let h = eigenvalues_only(&build_perturbed(&g, &v).unwrap()).unwrap();
    let h0 = eigenvalues_only(&build_free(&g)).unwrap();
    let a = TransformedPair::new(&h, &h0, TransformParams::new(2.0, 1)).unwrap();
    let b = TransformedPair::new(&h, &h0, TransformParams::new(3.0, 2)).unwrap();
    let schedule = EtaSchedule::gap_default();
    let energies: Vec<f64> = (0..10).map(|i| -0.33 + 0.47 * i as f64).collect();
    let mut worst = 0.0f64;
    let mut worst_err = 0.0f64;
    for &e in &energies {
        let pa = ssf_contour(&a, e, &schedule.transformed_heights(&a, &g, e), 1e-3).unwrap();
        let pb = ssf_contour(&b, e, &schedule.transformed_heights(&b, &g, e), 1e-3).unwrap();
        worst = worst.max((pa.value - pb.value).abs());
        worst_err = worst_err.max(pa.error + pb.error);
    }
    lines.push(Line {
        id: 3,
        name: "invariance principle",
        pass: worst <= 1e-4 && worst <= worst_err.max(1e-4),
        detail: format!(
            "max |ξ(M=2,ℓ=1) - ξ(M=3,ℓ=2)| = {worst:.3e} over 10 energies, combined error {worst_err:.1e} (≤ 1e-4)"
        ),
    });
}

fn krein(lines: &mut Vec<Line>) {
    let t = Instant::now();
    let exp = Experiment::new(preset("square-well-1d").unwrap()).unwrap();
    let report = exp.run_krein_check().unwrap();
    let elapsed = t.elapsed();
    let checks: Vec<_> = report.checks.iter().filter(|c| c.name.starts_with("krein")).collect();
    let worst = checks.iter().map(|c| c.observed).fold(0.0f64, f64::max);
    lines.push(Line {
        id: 4,
        name: "Krein trace identity",
        pass: !checks.is_empty() && worst <= 1e-3 && within(Duration::from_secs(120), elapsed),
        detail: format!(
            "max relative error {worst:.3e} over {} heat-kernel and bump functions (≤ 1e-3), {elapsed:.1?} (≤ 120 s)",
            checks.len()
        ),
    });
}

/// s-wave phase of an attractive square well `-v0` on `r < a`.
fn square_well_s_wave(k: f64, v0: f64, a: f64) -> f64 {
    let kp = (k * k + v0).sqrt();
    -k * a + ((k / kp) * (kp * a).tan()).atan()
}

fn phase_oracle(lines: &mut Vec<Line>) {
    let well = Potential::square_well(-4.0, 1.0);
    let opts = PhaseOptions::default();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let k = 0.1 + 9.9 * i as f64 / 49.0;
        let d = phase_shift_radial(&well, 0, k, &opts).unwrap();
        worst = worst.max(principal(d - square_well_s_wave(k, 4.0, 1.0)).abs());
    }
    // Fixed steps that divide the well edge, so every run restarts on it.
    let k = 2.0;
    let at = |step: f64| {
        let o = PhaseOptions {
            step: Some(step),
            matching_radius: Some(8.0),
        };
        phase_shift_radial(&well, 0, k, &o).unwrap()
    };
    let (d1, d2, d3) = (at(0.1), at(0.05), at(0.025));
    let ratio = (d1 - d2) / (d2 - d3);
    lines.push(Line {
        id: 5,
        name: "square-well phase oracle",
        pass: worst <= 1e-6 && (12.0..=20.0).contains(&ratio),
        detail: format!(
            "max |δ₀ - closed form| = {worst:.3e} at 50 momenta in [0.1, 10] (≤ 1e-6); step-halving ratio {ratio:.2} (in [12, 20])"
        ),
    });
}

fn levinson(lines: &mut Vec<Line>) {
    let well = Potential::square_well(-4.0, 1.0);
    let g = Grid::radial(40.0, 3999, 0).unwrap();
    let h = eigenvalues_only(&build_perturbed(&g, &well).unwrap()).unwrap();
    let bound = h.values().iter().filter(|&&e| e < 0.0).count();
    let ks = momentum_grid(0.01, 30.0, 0.5, 40, 0.05, &[]);
    let curve = phase_curve(&well, Channel::Radial { l: 0 }, &ks, &PhaseOptions::default()).unwrap();
    let d0 = curve.at(0.01).unwrap();
    let check = levinson_check(&curve, bound);
    lines.push(Line {
        id: 6,
        name: "Levinson endpoint",
        pass: bound == 1 && (d0 - PI).abs() <= 0.15 && check.pass,
        detail: format!("δ₀(0.01) = {d0:.5}, |δ₀ - π| = {:.3e} (≤ 0.15); grid bound states {bound}", (d0 - PI).abs()),
    });
}

fn friedel(lines: &mut Vec<Line>) {
    let t = Instant::now();
    let one = Experiment::new(preset("gaussian-1d").unwrap()).unwrap().run_friedel_check().unwrap();
    let t1 = t.elapsed();
    let t = Instant::now();
    let three = Experiment::new(preset("square-well-3d").unwrap()).unwrap().run_friedel_check().unwrap();
    let t3 = t.elapsed();
    let (ok1, w1, tol1) = check_line(&one, "friedel");
    let (ok3, w3, tol3) = check_line(&three, "friedel");
    let n1 = one.rows.iter().filter(|r| r.lambda > 0.0).count();
    lines.push(Line {
        id: 7,
        name: "Friedel sum rule",
        pass: ok1 && ok3 && w1 <= 0.05 && w3 <= 0.08 && tol1 <= 0.05 && tol3 <= 0.08 && n1 == 8
            && within(Duration::from_secs(600), t1),
        detail: format!(
            "1D gaussian max pairwise {w1:.3e} over {n1} energies (≤ 0.05, {t1:.1?}); 3D square well {w3:.3e} (≤ 0.08, {t3:.1?})"
        ),
    });
}

fn cutoff_decay(lines: &mut Vec<Line>) {
    let mut config = preset("gaussian-1d").unwrap();
    config.excess.box_doubling = true;
    config.ssf.energies = EnergySpec::List(vec![1.0]);
    let report = Experiment::new(config).unwrap().run_excess().unwrap();
    let (_, eps, _) = check_line(&report, "cutoff-decay-exponent");
    let (_, fraction, _) = check_line(&report, "cutoff-fit-residual");
    let (_, shift, _) = check_line(&report, "box-doubling");
    lines.push(Line {
        id: 8,
        name: "cutoff-decay probe",
        pass: eps > 0.0 && fraction < 0.1 && shift < 0.02,
        detail: format!(
            "ε̂ = {eps:.3} (> 0); residual / |Z_Rmin - Z_∞| = {fraction:.3e} (< 0.1); |ΔZ_∞| under L doubling = {shift:.3e} (< 0.02)"
        ),
    });
}

fn probes(lines: &mut Vec<Line>) {
    let exp = Experiment::new(preset("probes").unwrap()).unwrap();
    let (lo, hi) = spectral_shift::ssf::beta_window(&exp.potential, 1).unwrap();
    let beta = exp.beta().unwrap();
    let report = exp.run_probes().unwrap();
    let (_, fraction, _) = check_line(&report, "w-trace-cauchy");
    lines.push(Line {
        id: 9,
        name: "W trace probe",
        pass: fraction < 0.02 && (beta - 0.5 * (lo + hi)).abs() < 1e-12,
        detail: format!(
            "final difference / value = {fraction:.3e} with shrinking differences (< 0.02); β = {beta} in window ({lo}, {hi})"
        ),
    });
    let (_, contraction, _) = check_line(&report, "boundary-contraction");
    lines.push(Line {
        id: 10,
        name: "boundary-limit probe",
        pass: contraction >= 1.5,
        detail: format!("smallest contraction of successive differences {contraction:.3} at λ = 1 (≥ 1.5)"),
    });
}

#[test]
fn acceptance_criteria() {
    let mut lines = Vec::new();
    let steps: [fn(&mut Vec<Line>); 8] =
        [stone_and_routes, invariance, krein, phase_oracle, levinson, friedel, cutoff_decay, probes];
    for step in steps {
        let before = lines.len();
        step(&mut lines);
        lines[before..].iter().for_each(emit);
    }
    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert_eq!(lines.len(), 10);
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
