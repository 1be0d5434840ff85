//! Pipelines behind the command-line runner. Each run turns a validated
//! [`ExperimentConfig`] into a [`RunReport`] whose files are byte-identical
//! for identical configs.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::excess::{excess_radii, extrapolate_r, CutoffProfile, ExcessTable, RFit, CHANNEL_CUTOFF};
use crate::operators::{build_free, build_perturbed, certify_decay, DecayCertificate, DecayReport, Grid, Potential};
use crate::scattering::{
    l_max_policy, levinson_check, momentum_grid, phase_curve, total_phase_1d, total_phase_3d, Channel, PhaseCurve,
    PhaseOptions, TotalPhase,
};
use crate::spectral::{
    counting_curve, counting_difference, eigendecompose, eigendecompose_below, eigenvalues_only, krein_lhs,
    krein_rhs, EigenSystem, Route, TestFunction,
};
use crate::ssf::{
    beta_window, boundary_limit_probe, ssf_contour, ssf_contour_at, ssf_determinant, ssf_determinant_at,
    w_trace_probe, SsfPoint, TransformedPair,
};

/// Traces below this are compared in absolute terms.
const KREIN_FLOOR: f64 = 1e-12;

/// One line of `curves.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub lambda: f64,
    pub xi: f64,
    pub xi_err: f64,
    /// Smallest smoothing height in energy units; zero for exact values.
    pub eta: f64,
    pub route: String,
}

/// Per-energy summary; absent columns were not computed by the run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub lambda: f64,
    pub xi_contour: Option<f64>,
    pub xi_contour_err: Option<f64>,
    pub xi_determinant: Option<f64>,
    pub xi_determinant_err: Option<f64>,
    /// Exact finite-grid staircase `N_H(λ) - N_{H₀}(λ)`.
    pub counting: Option<f64>,
    pub theta: Option<f64>,
    pub theta_err: Option<f64>,
    pub z_inf: Option<f64>,
    pub z_err: Option<f64>,
    pub epsilon: Option<f64>,
    pub fit_residual: Option<f64>,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    /// Passes when `observed ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, observed: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            observed,
            tolerance,
            pass: observed <= tolerance,
            detail: detail.into(),
        }
    }

    /// Passes when `observed ≥ tolerance`.
    pub fn at_least(name: impl Into<String>, observed: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            observed,
            tolerance,
            pass: observed >= tolerance,
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub name: String,
    pub version: String,
    pub config_hash: String,
    pub rows: Vec<ReportRow>,
    pub curves: Vec<CurveRow>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    pub details: Value,
}

impl RunReport {
    fn new(command: &str, exp: &Experiment) -> Self {
        Self {
            command: command.into(),
            name: exp.config.experiment.name.clone(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: exp.hash.clone(),
            rows: Vec::new(),
            curves: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            details: json!({}),
        }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// 0 when every check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("lambda,xi,xi_err,eta,route\n");
        for r in &self.curves {
            let _ = writeln!(s, "{:.16e},{:.16e},{:.16e},{:.16e},{}", r.lambda, r.xi, r.xi_err, r.eta, r.route);
        }
        s
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
        let mut s = String::new();
        let _ = writeln!(s, "{} / {}  (version {}, config {})", self.command, self.name, self.version, &self.config_hash[..16.min(self.config_hash.len())]);
        if !self.rows.is_empty() {
            let _ = writeln!(
                s,
                "\n{:>10} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>9}  status",
                "lambda", "xi_contour", "xi_determ", "counting", "theta", "z_inf", "z_err", "epsilon"
            );
            for r in &self.rows {
                let _ = writeln!(
                    s,
                    "{:>10.5} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>9}  {}",
                    r.lambda,
                    opt(r.xi_contour),
                    opt(r.xi_determinant),
                    opt(r.counting),
                    opt(r.theta),
                    opt(r.z_inf),
                    opt(r.z_err),
                    r.epsilon.map_or_else(|| "-".to_string(), |x| format!("{x:.3}")),
                    r.status
                );
            }
        }
        let _ = writeln!(s, "\nchecks:");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  {} {:<28} observed {:.3e}  tolerance {:.3e}  {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.tolerance,
                c.detail
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "\nresult: {}", if self.pass() { "PASS" } else { "FAIL" });
        s
    }

    /// Writes `curves.csv`, `report.json` and `report.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("curves.csv"), self.csv())?;
        std::fs::write(dir.join("report.json"), self.json())?;
        std::fs::write(dir.join("report.txt"), self.text())?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join("report.json");
        let text = std::fs::read_to_string(&path)?;
        serde_json::from_str(&text).map_err(|e| Error::config(path.display().to_string(), e.to_string()))
    }

    /// Concatenates earlier runs; checks and curves keep their run prefix.
    pub fn merge(runs: &[RunReport]) -> Self {
        let mut hasher = String::new();
        let mut out = RunReport {
            command: "report".into(),
            name: "merged".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: String::new(),
            rows: Vec::new(),
            curves: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
            details: json!({
                "runs": runs.iter().map(|r| json!({
                    "command": r.command,
                    "name": r.name,
                    "config_hash": r.config_hash,
                    "pass": r.pass(),
                })).collect::<Vec<_>>()
            }),
        };
        for r in runs {
            hasher.push_str(&r.config_hash);
            let prefix = format!("{}/{}", r.name, r.command);
            out.checks.extend(r.checks.iter().map(|c| Check {
                name: format!("{prefix}:{}", c.name),
                ..c.clone()
            }));
            out.curves.extend(r.curves.iter().map(|c| CurveRow {
                route: format!("{prefix}:{}", c.route),
                ..c.clone()
            }));
            out.notes.extend(r.notes.iter().map(|n| format!("{prefix}: {n}")));
        }
        use sha2::{Digest, Sha256};
        out.config_hash = Sha256::digest(hasher.as_bytes()).iter().map(|b| format!("{b:02x}")).collect();
        out
    }
}

/// Both operators of one channel on one grid.
struct Sector {
    grid: Grid,
    h: EigenSystem,
    h0: EigenSystem,
    pair: TransformedPair,
}

/// A validated config with its certified potential.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub potential: Potential,
    pub decay: DecayReport,
    pub hash: String,
}

impl Experiment {
    /// Validates the config and certifies the decay of the potential with
    /// the configured seed.
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let p = &config.potential;
        let bare = Potential::new(p.shape).with_center(p.center);
        let decay = certify_decay(&bare, p.alpha, config.experiment.dimension, p.samples, config.experiment.seed)
            .map_err(|e| e.at("potential"))?;
        if !decay.pass {
            return Err(Error::CertificateRejected(format!(
                "sampled sup |V|⟨x⟩^α keeps growing (inner {:e}, full {:e})",
                decay.c_inner, decay.c_fit
            ))
            .at("potential.alpha"));
        }
        if let Some(c) = p.constant {
            if decay.c_fit > c {
                return Err(Error::CertificateRejected(format!(
                    "sampled constant {:e} exceeds the claimed {c:e}",
                    decay.c_fit
                ))
                .at("potential.constant"));
            }
        }
        let potential = bare.with_certificate(DecayCertificate {
            alpha: p.alpha,
            constant: p.constant.unwrap_or(decay.c_fit),
        });
        let hash = config.hash();
        Ok(Self {
            config,
            potential,
            decay,
            hash,
        })
    }

    fn dimension(&self) -> usize {
        self.config.experiment.dimension
    }

    fn energies(&self) -> Vec<f64> {
        self.config.energies()
    }

    /// Highest partial wave: configured, or `⌈k a⌉ + 8` at the top energy.
    pub fn l_max(&self) -> u32 {
        let k = self.energies().last().copied().unwrap_or(0.0).max(0.0).sqrt();
        self.config
            .scattering
            .l_max
            .unwrap_or_else(|| l_max_policy(k, self.potential.length_scale()))
    }

    /// Channels `ℓ` and multiplicities: the single line channel, or radial
    /// waves `0..=ℓ_max` with weight `2ℓ + 1`.
    fn channels(&self) -> Vec<(u32, f64)> {
        match self.dimension() {
            1 => vec![(0, 1.0)],
            _ => (0..=self.l_max()).map(|l| (l, (2 * l + 1) as f64)).collect(),
        }
    }

    /// Eigenvector ceiling for the excess charge at every configured energy.
    fn vector_ceiling(&self) -> f64 {
        let top = self.energies().last().copied().unwrap_or(0.0);
        (2.0 * top + 2.0).max(top + 3.0)
    }

    fn sector(&self, grid: Grid, vectors_below: Option<f64>) -> Result<Sector> {
        let hm = build_perturbed(&grid, &self.potential)?;
        let h0m = build_free(&grid);
        let (h, h0) = match vectors_below {
            Some(e) => (eigendecompose_below(&hm, e)?, eigendecompose_below(&h0m, e)?),
            None => (eigenvalues_only(&hm)?, eigenvalues_only(&h0m)?),
        };
        let params = self.config.transform(h.min().min(h0.min()));
        let pair = TransformedPair::new(&h, &h0, params).map_err(|e| e.at("transform"))?;
        Ok(Sector { grid, h, h0, pair })
    }

    fn channel_grid(&self, l: u32) -> Result<Grid> {
        self.config.grid(l).map_err(|e| e.at("grid"))
    }

    fn smallest_eta(&self, s: &Sector, energy: f64) -> f64 {
        self.config
            .ssf
            .eta
            .energy_heights(&s.pair, &s.grid, energy)
            .last()
            .copied()
            .unwrap_or(0.0)
    }

    fn boundary_point(&self, s: &Sector, energy: f64, route: Route) -> Result<SsfPoint> {
        let etas = self.config.ssf.eta.transformed_heights(&s.pair, &s.grid, energy);
        let tol = self.config.ssf.tolerance;
        match route {
            Route::Determinant => ssf_determinant(&s.pair, energy, &etas, tol),
            _ => ssf_contour(&s.pair, energy, &etas, tol),
        }
    }

    /// Spectral shift function by the configured resolvent routes.
    pub fn run_ssf(&self) -> Result<RunReport> {
        let mut report = RunReport::new("ssf", self);
        let energies = self.energies();
        let routes = self.config.ssf.routes.clone();
        let n = energies.len();
        let mut sums: Vec<Vec<Acc>> = vec![vec![Acc::default(); n]; routes.len()];
        let mut counting = vec![Acc::default(); n];
        let mut etas = vec![0.0; n];
        let mut route_gap: f64 = 0.0;
        let mut used = Vec::new();

        for (l, weight) in self.channels() {
            let s = self.sector(self.channel_grid(l)?, None)?;
            if used.is_empty() {
                etas = energies.iter().map(|&e| self.smallest_eta(&s, e)).collect();
            }
            let mut magnitude: f64 = 0.0;
            for (ri, &route) in routes.iter().enumerate() {
                let points: Vec<Result<SsfPoint>> =
                    energies.par_iter().map(|&e| self.boundary_point(&s, e, route)).collect();
                for (acc, p) in sums[ri].iter_mut().zip(points) {
                    let p = p.map(|p| (p.value, p.error));
                    if let Ok((v, _)) = p {
                        magnitude = magnitude.max(v.abs());
                    }
                    acc.add(weight, p);
                }
            }
            if routes.len() > 1 {
                route_gap = route_gap.max(self.raw_route_gap(&s, &energies));
            }
            for (acc, &e) in counting.iter_mut().zip(&energies) {
                acc.add(weight, counting_difference(&s.h, &s.h0, e).map(|c| (c as f64, 0.0)));
            }
            used.push(l);
            if self.dimension() == 3 && magnitude < CHANNEL_CUTOFF {
                break;
            }
        }

        for (i, &e) in energies.iter().enumerate() {
            let mut row = ReportRow {
                lambda: e,
                counting: counting[i].value(),
                ..Default::default()
            };
            let mut failures = Vec::new();
            for (ri, route) in routes.iter().enumerate() {
                let acc = &sums[ri][i];
                match (acc.value(), &acc.failure) {
                    (Some(v), _) => {
                        report.curves.push(CurveRow {
                            lambda: e,
                            xi: v,
                            xi_err: acc.error,
                            eta: etas[i],
                            route: route.as_str().into(),
                        });
                        match route {
                            Route::Determinant => {
                                row.xi_determinant = Some(v);
                                row.xi_determinant_err = Some(acc.error);
                            }
                            _ => {
                                row.xi_contour = Some(v);
                                row.xi_contour_err = Some(acc.error);
                            }
                        }
                    }
                    (None, Some(msg)) => failures.push(format!("{}: {msg}", route.as_str())),
                    (None, None) => {}
                }
            }
            row.status = if failures.is_empty() { "ok".into() } else { failures.join("; ") };
            report.rows.push(row);
        }

        let failed = report.rows.iter().filter(|r| r.status != "ok").count();
        report.checks.push(Check::at_most(
            "boundary-values",
            failed as f64,
            0.0,
            format!("{failed} of {n} energies failed the η → 0 limit"),
        ));
        if routes.len() > 1 {
            report.checks.push(Check::at_most(
                "route-equivalence",
                route_gap,
                self.config.tolerances.routes,
                "max |contour - determinant| over every sampled (λ, η)",
            ));
        }
        if matches!(self.config.ssf.eta, crate::ssf::EtaSchedule::SpectralGap { .. }) {
            let gap = report
                .rows
                .iter()
                .filter_map(|r| Some((r.xi_contour.or(r.xi_determinant)? - r.counting?).abs()))
                .fold(0.0f64, f64::max);
            report.checks.push(Check::at_most(
                "stone",
                gap,
                self.config.tolerances.stone,
                "max |ξ - (N_H - N_H0)| with gap-tied heights",
            ));
        }
        report.details = json!({ "channels": used });
        Ok(report)
    }

    /// Largest contour/determinant difference over every `(λ, η)` of a
    /// sector, before extrapolation.
    fn raw_route_gap(&self, s: &Sector, energies: &[f64]) -> f64 {
        energies
            .par_iter()
            .map(|&e| {
                self.config
                    .ssf
                    .eta
                    .transformed_heights(&s.pair, &s.grid, e)
                    .iter()
                    .filter_map(|&eta| {
                        let a = ssf_contour_at(&s.pair, e, eta).ok()?;
                        let b = ssf_determinant_at(&s.pair, e, eta).ok()?;
                        Some((a - b).abs())
                    })
                    .fold(0.0f64, f64::max)
            })
            .reduce(|| 0.0, f64::max)
    }

    fn phase_options(&self) -> PhaseOptions {
        PhaseOptions {
            step: self.config.scattering.step,
            matching_radius: self.config.scattering.matching_radius,
        }
    }

    fn momenta(&self) -> Vec<f64> {
        let s = &self.config.scattering;
        let ks: Vec<f64> = self.energies().iter().filter(|&&e| e > 0.0).map(|e| e.sqrt()).collect();
        momentum_grid(s.k_min, s.k_max, s.k_split, s.points_low, s.max_step, &ks)
    }

    /// Unwrapped channel curves, the total phase, and Levinson checks.
    fn phases(&self, checks: &mut Vec<Check>, notes: &mut Vec<String>) -> Result<(Vec<PhaseCurve>, TotalPhase)> {
        let momenta = self.momenta();
        let opts = self.phase_options();
        let energies = self.energies();
        let at = |c: Channel| phase_curve(&self.potential, c, &momenta, &opts).map_err(|e| e.at("scattering"));
        let (curves, total) = match self.dimension() {
            1 => {
                let even = at(Channel::Even)?;
                let odd = at(Channel::Odd)?;
                let total = total_phase_1d(&even, &odd, &energies)?;
                (vec![even, odd], total)
            }
            _ => {
                let curves = (0..=self.l_max())
                    .map(|l| at(Channel::Radial { l }))
                    .collect::<Result<Vec<_>>>()?;
                let total = total_phase_3d(&curves, &energies, self.config.tolerances.tail)
                    .map_err(|e| e.at("tolerances.tail"))?;
                (curves, total)
            }
        };

        if self.potential.is_zero() {
            notes.push("free pair: threshold phases are identically zero, Levinson counts skipped".into());
            return Ok((curves, total));
        }
        // Bound-state counts from grid eigendecompositions.
        let counts: Vec<usize> = match self.dimension() {
            1 => {
                let g = self.channel_grid(0)?;
                let n = eigenvalues_only(&build_perturbed(&g, &self.potential)?)?.count_below(0.0);
                // Bound states of an even potential alternate in parity,
                // starting with an even ground state.
                vec![(n + 1) / 2, n / 2]
            }
            _ => {
                let mut counts = Vec::new();
                for l in 0..curves.len() as u32 {
                    let bound = if counts.last() == Some(&0) {
                        0
                    } else {
                        let g = self.channel_grid(l)?;
                        eigenvalues_only(&build_perturbed(&g, &self.potential)?)?.count_below(0.0)
                    };
                    counts.push(bound);
                }
                counts
            }
        };
        for (curve, &n) in curves.iter().zip(&counts) {
            let lv = levinson_check(curve, n);
            checks.push(Check::at_most(
                format!("levinson[{}]", curve.channel.label()),
                lv.residual,
                self.config.tolerances.levinson,
                format!(
                    "δ({}) = {:.4}, expected {:.4} from {n} bound state(s)",
                    curve.momenta[0], lv.observed, lv.expected
                ),
            ));
        }
        Ok((curves, total))
    }

    /// Partial-wave phases and the total scattering phase `θ(λ)`.
    pub fn run_phase(&self) -> Result<RunReport> {
        let mut report = RunReport::new("phase", self);
        let mut checks = Vec::new();
        let mut notes = Vec::new();
        let (curves, total) = self.phases(&mut checks, &mut notes)?;
        for (i, &e) in total.energies.iter().enumerate() {
            report.rows.push(ReportRow {
                lambda: e,
                theta: Some(total.values[i]),
                theta_err: Some(total.tail_bounds[i]),
                status: if e > 0.0 { "ok".into() } else { "below threshold: θ = 0".into() },
                ..Default::default()
            });
            report.curves.push(CurveRow {
                lambda: e,
                xi: total.values[i],
                xi_err: total.tail_bounds[i],
                eta: 0.0,
                route: "phase".into(),
            });
        }
        report.checks = checks;
        report.notes = notes;
        report.details = json!({
            "l_max": total.l_max,
            "channels": curves.iter().map(|c| json!({
                "channel": c.channel.label(),
                "matching_radius": c.matching_radius,
                "threshold_phase": c.phases[0],
                "top_phase": c.phases.last(),
            })).collect::<Vec<_>>(),
        });
        Ok(report)
    }

    fn profiles(&self) -> Vec<CutoffProfile> {
        self.config
            .excess
            .radii
            .iter()
            .map(|&r| CutoffProfile::new(r).with_plateau(self.config.excess.plateau))
            .collect()
    }

    /// Channel-summed `Z_R(λ)` per energy (values and η spreads per radius),
    /// plus optionally `ξ(λ)` by the contour route.
    fn charge_sums(&self, grid_for: &dyn Fn(u32) -> Result<Grid>, with_ssf: bool) -> Result<ChargeSums> {
        let energies = self.energies();
        let n = energies.len();
        let radii = self.config.excess.radii.len();
        let profiles = self.profiles();
        let ceiling = self.vector_ceiling();
        let mut z = vec![vec![Acc::default(); radii]; n];
        let mut xi = vec![Acc::default(); n];
        let mut etas = vec![0.0; n];
        let mut used = Vec::new();
        for (l, weight) in self.channels() {
            let s = self.sector(grid_for(l)?, Some(ceiling))?;
            let table = ExcessTable::new(&s.h, &s.h0, s.pair.params, &profiles).map_err(|e| e.at("excess"))?;
            if used.is_empty() {
                etas = energies.iter().map(|&e| self.smallest_eta(&s, e)).collect();
            }
            let results: Vec<(Result<(Vec<f64>, Vec<f64>)>, Option<Result<SsfPoint>>)> = energies
                .par_iter()
                .map(|&e| {
                    let heights = self.config.ssf.eta.transformed_heights(&s.pair, &s.grid, e);
                    let zr = excess_radii(&table, e, &heights);
                    let x = with_ssf.then(|| self.boundary_point(&s, e, Route::Contour));
                    (zr, x)
                })
                .collect();
            let mut magnitude: f64 = 0.0;
            for (i, (zr, x)) in results.into_iter().enumerate() {
                match zr {
                    Ok((values, errors)) => {
                        magnitude = magnitude.max(values.last().map_or(0.0, |v| v.abs()));
                        for (r, acc) in z[i].iter_mut().enumerate() {
                            acc.add(weight, Ok((values[r], errors[r])));
                        }
                    }
                    Err(err) => {
                        let msg = err.to_string();
                        for acc in z[i].iter_mut() {
                            acc.add(weight, Err(Error::DomainCoverage(msg.clone())));
                        }
                    }
                }
                if let Some(x) = x {
                    let x = x.map(|p| (p.value, p.error));
                    if let Ok((v, _)) = x {
                        magnitude = magnitude.max(v.abs());
                    }
                    xi[i].add(weight, x);
                }
            }
            used.push(l);
            if self.dimension() == 3 && magnitude < CHANNEL_CUTOFF {
                break;
            }
        }
        Ok(ChargeSums {
            energies,
            z,
            xi,
            etas,
            channels: used,
        })
    }

    fn fit(&self, sums: &[Acc]) -> Result<(RFit, Vec<f64>, f64)> {
        if let Some(msg) = sums.iter().find_map(|a| a.failure.clone()) {
            return Err(Error::ExtrapolationUnreliable(msg));
        }
        let values: Vec<f64> = sums.iter().map(|a| a.value).collect();
        let spread = sums.iter().fold(0.0f64, |m, a| m.max(a.error));
        let fit = extrapolate_r(&self.config.excess.radii, &values, self.config.excess.max_residual)?;
        Ok((fit, values, spread))
    }

    /// Cutoff excess charge `Z_R(λ)` on the radius ladder and its `R → ∞`
    /// limit.
    pub fn run_excess(&self) -> Result<RunReport> {
        let mut report = RunReport::new("excess", self);
        let sums = self.charge_sums(&|l| self.channel_grid(l), false)?;
        let mut per_energy = Vec::new();
        let mut failed = 0;
        let probe = self.config.probes.energy;
        for (i, &e) in sums.energies.iter().enumerate() {
            let mut row = ReportRow {
                lambda: e,
                ..Default::default()
            };
            match self.fit(&sums.z[i]) {
                Ok((fit, values, spread)) => {
                    let err = fit.residual + spread;
                    row.z_inf = Some(fit.limit);
                    row.z_err = Some(err);
                    row.epsilon = Some(fit.exponent);
                    row.fit_residual = Some(fit.residual);
                    row.status = "ok".into();
                    report.curves.push(CurveRow {
                        lambda: e,
                        xi: fit.limit,
                        xi_err: err,
                        eta: sums.etas[i],
                        route: "excess".into(),
                    });
                    if e == probe {
                        let drop = (values[0] - fit.limit).abs();
                        report.checks.push(Check::at_least(
                            "cutoff-decay-exponent",
                            fit.exponent,
                            f64::MIN_POSITIVE,
                            format!("fitted ε at λ = {e}"),
                        ));
                        report.checks.push(Check::at_most(
                            "cutoff-fit-residual",
                            fit.residual / drop,
                            self.config.tolerances.fit_fraction,
                            format!("residual {:.3e} over |Z_Rmin - Z_∞| = {drop:.3e}", fit.residual),
                        ));
                    }
                    per_energy.push(json!({ "lambda": e, "z_r": values, "fit": fit }));
                }
                Err(err) => {
                    failed += 1;
                    row.status = format!("extrapolation failed: {err}");
                }
            }
            report.rows.push(row);
        }
        report.checks.push(Check::at_most(
            "excess-extrapolation",
            failed as f64,
            0.0,
            format!("{failed} of {} energies failed the R fit", sums.energies.len()),
        ));
        if !sums.energies.contains(&probe) {
            report
                .notes
                .push(format!("probe energy λ = {probe} is not on the energy grid; cutoff-decay checks skipped"));
        }
        if self.config.excess.box_doubling {
            let base = report.rows.iter().find(|r| r.lambda == probe).and_then(|r| r.z_inf);
            let doubled = self.doubled_limit(probe)?;
            match base {
                Some(z) => report.checks.push(Check::at_most(
                    "box-doubling",
                    (doubled - z).abs(),
                    self.config.tolerances.box_doubling,
                    format!("Z_∞({probe}) = {z:.6} at L, {doubled:.6} at 2L"),
                )),
                None => report.checks.push(Check::at_most(
                    "box-doubling",
                    f64::INFINITY,
                    self.config.tolerances.box_doubling,
                    "no base value at the probe energy",
                )),
            }
        }
        report.details = json!({
            "radii": self.config.excess.radii,
            "channels": sums.channels,
            "energies": per_energy,
        });
        Ok(report)
    }

    /// `Z_∞(λ)` recomputed with the box doubled at fixed spacing.
    fn doubled_limit(&self, energy: f64) -> Result<f64> {
        let mut config = self.config.clone();
        config.grid.half_width *= 2.0;
        config.grid.points = 2 * config.grid.points + 1;
        config.ssf.energies = crate::config::EnergySpec::List(vec![energy]);
        config.excess.box_doubling = false;
        let exp = Experiment::new(config)?;
        let sums = exp.charge_sums(&|l| exp.channel_grid(l), false)?;
        Ok(exp.fit(&sums.z[0]).map_err(|e| e.at("excess.box_doubling"))?.0.limit)
    }

    /// Compares `θ(λ)`, `ξ(λ)` and `Z_∞(λ)` at every positive energy.
    pub fn run_friedel_check(&self) -> Result<RunReport> {
        let mut report = RunReport::new("friedel-check", self);
        let mut checks = Vec::new();
        let mut notes = Vec::new();
        let (_, theta) = self.phases(&mut checks, &mut notes)?;
        let sums = self.charge_sums(&|l| self.channel_grid(l), true)?;
        let tol = self.config.tolerances.friedel;
        let mut worst: f64 = 0.0;
        let mut failed = Vec::new();
        let mut per_energy = Vec::new();
        for (i, &e) in sums.energies.iter().enumerate() {
            let mut row = ReportRow {
                lambda: e,
                theta: Some(theta.values[i]),
                theta_err: Some(theta.tail_bounds[i]),
                xi_contour: sums.xi[i].value(),
                xi_contour_err: sums.xi[i].value().map(|_| sums.xi[i].error),
                ..Default::default()
            };
            let z = self.fit(&sums.z[i]);
            let z_r: Vec<f64> = sums.z[i].iter().map(|a| a.value).collect();
            per_energy.push(json!({ "lambda": e, "z_r": z_r }));
            if let Ok((fit, _, spread)) = &z {
                row.z_inf = Some(fit.limit);
                row.z_err = Some(fit.residual + spread);
                row.epsilon = Some(fit.exponent);
                row.fit_residual = Some(fit.residual);
            }
            report.curves.push(CurveRow {
                lambda: e,
                xi: theta.values[i],
                xi_err: theta.tail_bounds[i],
                eta: 0.0,
                route: "phase".into(),
            });
            if let Some(v) = row.xi_contour {
                report.curves.push(CurveRow {
                    lambda: e,
                    xi: v,
                    xi_err: sums.xi[i].error,
                    eta: sums.etas[i],
                    route: "contour".into(),
                });
            }
            if let (Some(v), Some(err)) = (row.z_inf, row.z_err) {
                report.curves.push(CurveRow {
                    lambda: e,
                    xi: v,
                    xi_err: err,
                    eta: sums.etas[i],
                    route: "excess".into(),
                });
            }
            row.status = if e <= 0.0 {
                "below threshold: θ = 0, outside the (0, ∞) sum-rule scope".into()
            } else {
                match (row.xi_contour, &z) {
                    (Some(x), Ok((fit, _, _))) => {
                        let t = theta.values[i];
                        let d = (t - x).abs().max((t - fit.limit).abs()).max((x - fit.limit).abs());
                        worst = worst.max(d);
                        if d <= tol {
                            format!("ok: max pairwise {d:.3e}")
                        } else {
                            failed.push(e);
                            format!("discrepancy {d:.3e}")
                        }
                    }
                    (None, _) => {
                        failed.push(e);
                        format!(
                            "ξ extrapolation failed: {}",
                            sums.xi[i].failure.clone().unwrap_or_default()
                        )
                    }
                    (_, Err(err)) => {
                        failed.push(e);
                        format!("Z extrapolation failed: {err}")
                    }
                }
            };
            report.rows.push(row);
        }
        let in_scope = sums.energies.iter().filter(|&&e| e > 0.0).count();
        let mut friedel = Check::at_most(
            "friedel",
            worst,
            tol,
            format!(
                "max pairwise |θ - ξ|, |θ - Z_∞|, |ξ - Z_∞| over {in_scope} energies in (0, ∞); failed at {failed:?}"
            ),
        );
        friedel.pass &= failed.is_empty() && in_scope > 0;
        report.checks.push(friedel);
        report.checks.extend(checks);
        report.notes = notes;
        report.details = json!({
            "channels": sums.channels,
            "l_max_phase": theta.l_max,
            "radii": self.config.excess.radii,
            "energies": per_energy,
        });
        Ok(report)
    }

    fn krein_domain(&self, spectrum_min: f64) -> (f64, f64, f64) {
        let k = &self.config.krein;
        let lower = k.lower.unwrap_or(spectrum_min - 1.0);
        let reach = |f: &TestFunction| match *f {
            TestFunction::HeatKernel { time } => 30.0 / time,
            TestFunction::Gaussian { center, width } => center + 10.0 * width,
            TestFunction::Bump { center, half_width } => center + half_width,
        };
        let upper = k
            .upper
            .unwrap_or_else(|| k.functions.iter().map(reach).fold(lower + 1.0, f64::max) + 1.0);
        let step = k.max_step.unwrap_or_else(|| {
            k.functions.iter().map(|f| f.scale() / 20.0).fold(0.05, f64::min)
        });
        (lower, upper, step)
    }

    /// `Σ f(λ_j(H)) - Σ f(λ_j(H₀))` against `-∫ f' ξ` for every test
    /// function, with `ξ` the exact staircase of each channel.
    pub fn run_krein_check(&self) -> Result<RunReport> {
        let mut report = RunReport::new("krein-check", self);
        let functions = self.config.krein.functions.clone();
        if functions.is_empty() {
            return Err(Error::config("krein.functions", "no test functions configured"));
        }
        let mut lhs = vec![0.0; functions.len()];
        let mut rhs = vec![0.0; functions.len()];
        let mut used = Vec::new();
        for (l, weight) in self.channels() {
            let g = self.channel_grid(l)?;
            let h = eigenvalues_only(&build_perturbed(&g, &self.potential)?)?;
            let h0 = eigenvalues_only(&build_free(&g))?;
            let (lo, hi, step) = self.krein_domain(h.min().min(h0.min()));
            let curve = counting_curve(&h, &h0, lo, hi, step).map_err(|e| e.at("krein"))?;
            let mut largest: f64 = 0.0;
            for (i, f) in functions.iter().enumerate() {
                let a = krein_lhs(&h, &h0, f);
                let b = krein_rhs(&curve, f).map_err(|e| e.at(format!("krein.functions[{i}]")))?;
                lhs[i] += weight * a;
                rhs[i] += weight * b;
                largest = largest.max((weight * a).abs() / lhs[i].abs().max(1e-300));
            }
            if self.dimension() == 1 {
                report.curves.extend(curve.energies.iter().zip(&curve.values).map(|(&e, &v)| CurveRow {
                    lambda: e,
                    xi: v,
                    xi_err: 0.0,
                    eta: 0.0,
                    route: "counting".into(),
                }));
            }
            used.push(l);
            if self.dimension() == 3 && largest < 1e-2 * self.config.tolerances.krein {
                break;
            }
        }
        let mut rows = Vec::new();
        for (i, f) in functions.iter().enumerate() {
            let (a, b) = (lhs[i], rhs[i]);
            // Relative error, absolute once the trace itself is rounding noise.
            let rel = (a - b).abs() / a.abs().max(KREIN_FLOOR);
            report.checks.push(Check::at_most(
                format!("krein[{i}]"),
                rel,
                self.config.tolerances.krein,
                format!("{f:?}: lhs {a:.12e}, rhs {b:.12e}"),
            ));
            rows.push(json!({ "function": f, "lhs": a, "rhs": b, "relative_error": rel }));
        }
        report.details = json!({ "functions": rows, "channels": used });
        Ok(report)
    }

    fn probe_grid(&self, points: usize) -> Result<Grid> {
        let w = self.config.probes.half_width;
        match self.dimension() {
            1 => Grid::line(w, points),
            _ => Grid::radial(w, points, 0),
        }
        .map_err(|e| e.at("probes"))
    }

    /// Weight exponent: configured or the midpoint of the admissible window.
    pub fn beta(&self) -> Result<f64> {
        match self.config.probes.beta {
            Some(b) => Ok(b),
            None => {
                let (lo, hi) = beta_window(&self.potential, self.dimension())?;
                Ok(if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 })
            }
        }
    }

    /// Weighted trace probe along the refinement ladder and the boundary
    /// limit probe at `probes.energy`.
    pub fn run_probes(&self) -> Result<RunReport> {
        let mut report = RunReport::new("probes", self);
        let p = &self.config.probes;
        let beta = self.beta()?;
        let tol = &self.config.tolerances;
        // σ(H) ≥ min V on every grid, so one shift serves the whole ladder.
        let params = self.config.transform(-self.potential.max_abs());
        let grids = p
            .ladder
            .iter()
            .map(|&n| self.probe_grid(n))
            .collect::<Result<Vec<_>>>()?;
        let w = w_trace_probe(&grids, &self.potential, &params, beta).map_err(|e| e.at("probes"))?;
        let last = w.differences.last().copied().unwrap_or(0.0);
        let value = w.sums.last().copied().unwrap_or(0.0);
        let shrinking = w.differences.windows(2).all(|d| d[1] < d[0]);
        let fraction = if value == 0.0 { 0.0 } else { last / value.abs() };
        report.checks.push(Check::at_most(
            "w-trace-cauchy",
            if shrinking { fraction } else { f64::INFINITY },
            tol.cauchy_fraction,
            format!("sums {:?}, differences {:?}", w.sums, w.differences),
        ));

        let g = self.probe_grid(p.boundary_points)?;
        let h = eigendecompose(&build_perturbed(&g, &self.potential)?)?;
        let h0 = eigendecompose(&build_free(&g))?;
        let bparams = self.config.transform(h.min().min(h0.min()));
        let etas = p.etas();
        let b = boundary_limit_probe(&h, &h0, &bparams, p.energy, beta, &etas).map_err(|e| e.at("probes"))?;
        let contraction = b.min_contraction();
        let gap = h.distance_to_spectrum(p.energy).min(h0.distance_to_spectrum(p.energy));
        report.checks.push(Check::at_least(
            "boundary-contraction",
            contraction,
            tol.contraction,
            format!("norms {:?}, distance from λ to the spectra {gap:.3e}", b.norms),
        ));
        if gap < 10.0 * etas[etas.len() - 1] {
            report.notes.push(format!(
                "λ = {} lies {gap:.3e} from the grid spectrum, comparable to the smallest η; \
                 on a finite grid the limit resolves individual eigenvalues",
                p.energy
            ));
        }
        report.details = json!({ "beta": beta, "weight_probe": w, "boundary_probe": b });
        Ok(report)
    }

    /// Runs a pipeline by its command name.
    pub fn run(&self, command: &str) -> Result<RunReport> {
        match command {
            "ssf" => self.run_ssf(),
            "phase" => self.run_phase(),
            "excess" => self.run_excess(),
            "friedel-check" => self.run_friedel_check(),
            "krein-check" => self.run_krein_check(),
            "probes" => self.run_probes(),
            other => Err(Error::config("<command>", format!("unknown command `{other}`"))),
        }
    }

    /// Output directory: the configured one, else `runs/<name>-<command>`.
    pub fn output_dir(&self, command: &str) -> PathBuf {
        self.config
            .output
            .dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("runs").join(format!("{}-{command}", self.config.experiment.name)))
    }
}

struct ChargeSums {
    energies: Vec<f64>,
    /// `z[i][r]`: channel-summed `Z_R` at energy `i`, radius `r`.
    z: Vec<Vec<Acc>>,
    xi: Vec<Acc>,
    etas: Vec<f64>,
    channels: Vec<u32>,
}

/// Weighted channel sum that remembers the first failure.
#[derive(Debug, Clone, Default)]
struct Acc {
    value: f64,
    error: f64,
    failure: Option<String>,
}

impl Acc {
    fn add(&mut self, weight: f64, x: Result<(f64, f64)>) {
        match x {
            Ok((v, e)) => {
                self.value += weight * v;
                self.error += weight * e;
            }
            Err(err) => {
                if self.failure.is_none() {
                    self.failure = Some(err.to_string());
                }
            }
        }
    }

    fn value(&self) -> Option<f64> {
        self.failure.is_none().then_some(self.value)
    }
}
