//! Experiment configuration: a TOML document whose sections mirror the
//! library modules. Unknown keys are rejected; every documented default is
//! filled in explicitly so the serialized config reproduces a run exactly.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::excess::BOX_FRACTION;
use crate::operators::{DecayCertificate, Grid, Potential, Shape};
use crate::scattering::LEVINSON_TOL;
use crate::spectral::{Route, TestFunction};
use crate::ssf::{EtaSchedule, TransformParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub grid: GridSection,
    pub potential: PotentialSection,
    #[serde(default)]
    pub transform: TransformSection,
    pub ssf: SsfSection,
    #[serde(default)]
    pub excess: ExcessSection,
    #[serde(default)]
    pub scattering: ScatteringSection,
    #[serde(default)]
    pub probes: ProbesSection,
    #[serde(default)]
    pub krein: KreinSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    /// 1 (line with parity channels) or 3 (radial partial waves).
    pub dimension: usize,
    /// Seed of the sampling-based decay certification.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

/// `half_width` is `L`: the line box is `[-L, L]`, the radial box `(0, L]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub half_width: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub shape: Shape,
    #[serde(default)]
    pub center: f64,
    /// Decay exponent of the certificate `|V| ≤ C ⟨x⟩^{-α}`.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    /// Claimed constant; when absent the sampled constant is used.
    #[serde(default)]
    pub constant: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransformSection {
    /// `M`; default `2 + max(0, -inf σ(H))`.
    #[serde(default)]
    pub shift: Option<f64>,
    /// `ℓ`; default the smallest admissible power.
    #[serde(default)]
    pub power: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnergySpec {
    List(Vec<f64>),
    Range(EnergyRange),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl EnergySpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            EnergySpec::List(v) => v.clone(),
            EnergySpec::Range(r) if r.count == 1 => vec![r.start],
            EnergySpec::Range(r) => (0..r.count)
                .map(|i| r.start + (r.stop - r.start) * i as f64 / (r.count - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsfSection {
    pub energies: EnergySpec,
    #[serde(default = "EtaSchedule::level_spacing_default")]
    pub eta: EtaSchedule,
    /// Largest accepted η-extrapolation spread.
    #[serde(default = "default_spread")]
    pub tolerance: f64,
    #[serde(default = "default_routes")]
    pub routes: Vec<Route>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcessSection {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_plateau")]
    pub plateau: f64,
    /// Noise floor of the `R` fit.
    #[serde(default = "default_max_residual")]
    pub max_residual: f64,
    /// Repeat the run with the box doubled (same spacing) and compare `Z_∞`.
    #[serde(default)]
    pub box_doubling: bool,
}

impl Default for ExcessSection {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            plateau: default_plateau(),
            max_residual: default_max_residual(),
            box_doubling: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringSection {
    #[serde(default = "default_k_min")]
    pub k_min: f64,
    #[serde(default = "default_k_max")]
    pub k_max: f64,
    /// Geometric spacing below, uniform spacing above.
    #[serde(default = "default_k_split")]
    pub k_split: f64,
    #[serde(default = "default_points_low")]
    pub points_low: usize,
    #[serde(default = "default_k_step")]
    pub max_step: f64,
    /// Highest partial wave; default `⌈k a⌉ + 8` at the largest energy.
    #[serde(default)]
    pub l_max: Option<u32>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub matching_radius: Option<f64>,
}

impl Default for ScatteringSection {
    fn default() -> Self {
        Self {
            k_min: default_k_min(),
            k_max: default_k_max(),
            k_split: default_k_split(),
            points_low: default_points_low(),
            max_step: default_k_step(),
            l_max: None,
            step: None,
            matching_radius: None,
        }
    }
}

/// Operator-level probes run on their own (small) grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbesSection {
    /// Weight exponent; default the midpoint of the admissible window.
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default = "default_probe_width")]
    pub half_width: f64,
    /// Refinement ladder for the weighted trace probe.
    #[serde(default = "default_ladder")]
    pub ladder: Vec<usize>,
    /// Grid of the boundary-limit probe.
    #[serde(default = "default_boundary_points")]
    pub boundary_points: usize,
    #[serde(default = "default_probe_energy")]
    pub energy: f64,
    /// Heights `η_j = eta0 2^{-j}`, `j < eta_count`, in energy units.
    #[serde(default = "default_eta0")]
    pub eta0: f64,
    #[serde(default = "default_eta_count")]
    pub eta_count: usize,
}

impl Default for ProbesSection {
    fn default() -> Self {
        Self {
            beta: None,
            half_width: default_probe_width(),
            ladder: default_ladder(),
            boundary_points: default_boundary_points(),
            energy: default_probe_energy(),
            eta0: default_eta0(),
            eta_count: default_eta_count(),
        }
    }
}

impl ProbesSection {
    pub fn etas(&self) -> Vec<f64> {
        (0..self.eta_count).map(|j| self.eta0 * 0.5f64.powi(j as i32)).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KreinSection {
    #[serde(default)]
    pub functions: Vec<TestFunction>,
    /// Curve domain; defaults cover the spectrum and the support of every `f`.
    #[serde(default)]
    pub lower: Option<f64>,
    #[serde(default)]
    pub upper: Option<f64>,
    #[serde(default)]
    pub max_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Discrete Stone formula: `|ξ - (N_H - N_{H₀})|`.
    #[serde(default = "tol_stone")]
    pub stone: f64,
    /// Contour vs determinant at each `(λ, η)`.
    #[serde(default = "tol_routes")]
    pub routes: f64,
    /// Relative Krein error.
    #[serde(default = "tol_krein")]
    pub krein: f64,
    /// Pairwise `θ, ξ, Z_∞` discrepancy.
    #[serde(default = "tol_friedel")]
    pub friedel: f64,
    #[serde(default = "tol_levinson")]
    pub levinson: f64,
    /// Partial-wave truncation tail.
    #[serde(default = "tol_tail")]
    pub tail: f64,
    /// Fit residual as a fraction of `|Z_{R_min} - Z_∞|`.
    #[serde(default = "tol_fit_fraction")]
    pub fit_fraction: f64,
    /// `|Z_∞(2L) - Z_∞(L)|`.
    #[serde(default = "tol_box")]
    pub box_doubling: f64,
    /// Last weighted-trace difference as a fraction of the sum.
    #[serde(default = "tol_cauchy")]
    pub cauchy_fraction: f64,
    /// Minimal shrink factor of successive boundary-probe differences.
    #[serde(default = "tol_contraction")]
    pub contraction: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            stone: tol_stone(),
            routes: tol_routes(),
            krein: tol_krein(),
            friedel: tol_friedel(),
            levinson: tol_levinson(),
            tail: tol_tail(),
            fit_fraction: tol_fit_fraction(),
            box_doubling: tol_box(),
            cauchy_fraction: tol_cauchy(),
            contraction: tol_contraction(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

fn default_seed() -> u64 {
    7
}
fn default_alpha() -> f64 {
    8.0
}
fn default_samples() -> usize {
    4000
}
fn default_spread() -> f64 {
    0.05
}
fn default_routes() -> Vec<Route> {
    vec![Route::Contour, Route::Determinant]
}
fn default_radii() -> Vec<f64> {
    vec![5.0, 10.0, 20.0, 40.0]
}
fn default_plateau() -> f64 {
    0.5
}
fn default_max_residual() -> f64 {
    0.01
}
fn default_k_min() -> f64 {
    0.01
}
fn default_k_max() -> f64 {
    30.0
}
fn default_k_split() -> f64 {
    0.5
}
fn default_points_low() -> usize {
    40
}
fn default_k_step() -> f64 {
    0.05
}
fn default_probe_width() -> f64 {
    10.0
}
fn default_ladder() -> Vec<usize> {
    vec![99, 199, 399, 799]
}
fn default_boundary_points() -> usize {
    399
}
fn default_probe_energy() -> f64 {
    1.0
}
fn default_eta0() -> f64 {
    0.1
}
fn default_eta_count() -> usize {
    7
}
fn tol_stone() -> f64 {
    1e-6
}
fn tol_routes() -> f64 {
    1e-8
}
fn tol_krein() -> f64 {
    1e-3
}
fn tol_friedel() -> f64 {
    0.05
}
fn tol_levinson() -> f64 {
    LEVINSON_TOL
}
fn tol_tail() -> f64 {
    1e-3
}
fn tol_fit_fraction() -> f64 {
    0.1
}
fn tol_box() -> f64 {
    0.02
}
fn tol_cauchy() -> f64 {
    0.02
}
fn tol_contraction() -> f64 {
    1.5
}

fn positive(path: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, format!("must be positive and finite (got {x})")))
    }
}

fn increasing(path: &str, xs: &[f64]) -> Result<()> {
    if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) || xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config(path, "must be a nonempty, finite, strictly increasing list"));
    }
    Ok(())
}

impl ExperimentConfig {
    /// Parses TOML text, applies `KEY=VAL` tolerance overrides and validates.
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let value: toml::Value = toml::from_str(text).map_err(|e| Error::config("<toml>", e.to_string()))?;
        Self::from_value(value, overrides)
    }

    pub fn from_path(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text, overrides)
    }

    /// Re-parses an in-memory config so overrides and validation follow
    /// the same path as a file.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let value = toml::Value::try_from(self).map_err(|e| Error::config("<config>", e.to_string()))?;
        Self::from_value(value, overrides)
    }

    fn from_value(mut value: toml::Value, overrides: &[String]) -> Result<Self> {
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let config: Self = value
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("<toml>", e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::config("<config>", e.to_string()))
    }

    /// SHA-256 of the canonical JSON serialization, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn energies(&self) -> Vec<f64> {
        self.ssf.energies.values()
    }

    /// Grid for channel `l` (ignored on the line).
    pub fn grid(&self, l: u32) -> Result<Grid> {
        match self.experiment.dimension {
            1 => Grid::line(self.grid.half_width, self.grid.points),
            _ => Grid::radial(self.grid.half_width, self.grid.points, l),
        }
    }

    /// Potential carrying the configured certificate, not yet verified.
    pub fn potential(&self) -> Potential {
        let mut v = Potential::new(self.potential.shape).with_center(self.potential.center);
        v.decay = Some(DecayCertificate {
            alpha: self.potential.alpha,
            constant: self.potential.constant.unwrap_or(f64::INFINITY),
        });
        v
    }

    /// Transform parameters for a pair whose spectra start at `spectrum_min`.
    pub fn transform(&self, spectrum_min: f64) -> TransformParams {
        let d = TransformParams::default_for(spectrum_min);
        TransformParams::new(
            self.transform.shift.unwrap_or(d.shift),
            self.transform
                .power
                .unwrap_or_else(|| TransformParams::power_for_dimension(self.experiment.dimension)),
        )
    }

    /// Every module precondition that can be checked without a solve.
    pub fn validate(&self) -> Result<()> {
        let n = self.experiment.dimension;
        if n != 1 && n != 3 {
            return Err(Error::config("experiment.dimension", format!("must be 1 or 3 (got {n})")));
        }
        if self.experiment.name.is_empty() {
            return Err(Error::config("experiment.name", "must not be empty"));
        }
        self.grid(0).map_err(|e| e.at("grid"))?;
        let v = Potential::new(self.potential.shape).with_center(self.potential.center);
        v.validate().map_err(|e| e.at("potential"))?;
        if n == 3 && self.potential.center != 0.0 {
            return Err(Error::config("potential.center", "radial problems need a centered potential"));
        }
        if n == 1 && !v.is_even() {
            return Err(Error::config("potential.center", "parity channels need a potential even about 0"));
        }
        if !(self.potential.alpha > n as f64 + 3.0) {
            return Err(Error::config(
                "potential.alpha",
                format!("decay exponent must exceed n + 3 = {} (got {})", n + 3, self.potential.alpha),
            ));
        }
        if let Some(c) = self.potential.constant {
            if !(c >= 0.0) {
                return Err(Error::config("potential.constant", "must be nonnegative"));
            }
        }
        if self.potential.samples < 1000 {
            return Err(Error::config("potential.samples", "need at least 1000 samples"));
        }

        if let Some(shift) = self.transform.shift {
            // inf σ(H) ≤ 0 on every grid here, so M > 1 is necessary; the
            // exact bound is enforced once the spectrum is known.
            if !(shift > 1.0) || !shift.is_finite() {
                return Err(Error::config(
                    "transform.shift",
                    format!("M = {shift} violates M > 1 + max(0, -inf σ(H)) ≥ 1"),
                ));
            }
        }
        if let Some(p) = self.transform.power {
            if !(p as f64 > n as f64 / 2.0 - 1.0) || p == 0 {
                return Err(Error::config(
                    "transform.power",
                    format!("ℓ = {p} violates n/2 - 1 < ℓ with n = {n}"),
                ));
            }
        }

        let energies = self.energies();
        increasing("ssf.energies", &energies)?;
        self.ssf.eta.validate()?;
        positive("ssf.tolerance", self.ssf.tolerance)?;
        if self.ssf.routes.is_empty()
            || self.ssf.routes.iter().any(|r| !matches!(r, Route::Contour | Route::Determinant))
        {
            return Err(Error::config("ssf.routes", "routes must be a nonempty subset of [contour, determinant]"));
        }

        increasing("excess.radii", &self.excess.radii)?;
        if self.excess.radii[0] <= 0.0 {
            return Err(Error::config("excess.radii", "radii must be positive"));
        }
        let box_length = self.grid(0)?.box_length();
        let r_max = *self.excess.radii.last().expect("nonempty");
        if r_max > BOX_FRACTION * box_length {
            return Err(Error::config(
                "excess.radii",
                format!("R = {r_max} exceeds {BOX_FRACTION} × box length {box_length}"),
            ));
        }
        if !(self.excess.plateau > 0.0 && self.excess.plateau < 1.0) {
            return Err(Error::config("excess.plateau", "must lie in (0, 1)"));
        }
        positive("excess.max_residual", self.excess.max_residual)?;

        let s = &self.scattering;
        positive("scattering.k_min", s.k_min)?;
        positive("scattering.max_step", s.max_step)?;
        if !(s.k_max > s.k_split && s.k_split >= s.k_min) {
            return Err(Error::config("scattering.k_max", "need k_min ≤ k_split < k_max"));
        }
        let k_top = energies.last().copied().unwrap_or(0.0).max(0.0).sqrt();
        if k_top > s.k_max {
            return Err(Error::config(
                "scattering.k_max",
                format!("k_max = {} is below √λ_max = {k_top}", s.k_max),
            ));
        }
        if let Some(h) = s.step {
            positive("scattering.step", h)?;
        }
        if let Some(r) = s.matching_radius {
            positive("scattering.matching_radius", r)?;
        }

        let p = &self.probes;
        positive("probes.half_width", p.half_width)?;
        positive("probes.eta0", p.eta0)?;
        if p.eta_count < 3 {
            return Err(Error::config("probes.eta_count", "need at least 3 heights"));
        }
        if p.ladder.len() < 2 || p.ladder.windows(2).any(|w| w[1] <= w[0]) || p.ladder[0] < 3 {
            return Err(Error::config("probes.ladder", "need ≥ 2 strictly increasing sizes ≥ 3"));
        }
        if p.boundary_points < 3 {
            return Err(Error::config("probes.boundary_points", "need at least 3 points"));
        }
        if let Some(beta) = p.beta {
            crate::ssf::check_beta(beta, &self.potential(), n).map_err(|e| e.at("probes.beta"))?;
        }

        for (i, f) in self.krein.functions.iter().enumerate() {
            let ok = match *f {
                TestFunction::Gaussian { width, .. } => width > 0.0,
                TestFunction::HeatKernel { time } => time > 0.0,
                TestFunction::Bump { half_width, .. } => half_width > 0.0,
            };
            if !ok {
                return Err(Error::config(format!("krein.functions[{i}]"), "scale must be positive"));
            }
        }
        if let (Some(lo), Some(hi)) = (self.krein.lower, self.krein.upper) {
            if !(hi > lo) {
                return Err(Error::config("krein.upper", "must exceed krein.lower"));
            }
        }
        if let Some(h) = self.krein.max_step {
            positive("krein.max_step", h)?;
        }

        let t = &self.tolerances;
        for (key, v) in [
            ("stone", t.stone),
            ("routes", t.routes),
            ("krein", t.krein),
            ("friedel", t.friedel),
            ("levinson", t.levinson),
            ("tail", t.tail),
            ("fit_fraction", t.fit_fraction),
            ("box_doubling", t.box_doubling),
            ("cauchy_fraction", t.cauchy_fraction),
            ("contraction", t.contraction),
        ] {
            positive(&format!("tolerances.{key}"), v)?;
        }
        Ok(())
    }
}

/// `KEY=VAL` with `KEY` a field of `[tolerances]`, optionally prefixed by
/// `tolerances.`.
fn apply_override(value: &mut toml::Value, item: &str) -> Result<()> {
    let (key, val) = item
        .split_once('=')
        .ok_or_else(|| Error::config("--tolerance-override", format!("expected KEY=VAL, got `{item}`")))?;
    let key = key.trim();
    let key = key.strip_prefix("tolerances.").unwrap_or(key);
    let path = format!("tolerances.{key}");
    let number: f64 = val
        .trim()
        .parse()
        .map_err(|_| Error::config(&path, format!("`{val}` is not a number")))?;
    if !Tolerances::KEYS.contains(&key) {
        return Err(Error::config(&path, "unknown tolerance"));
    }
    let root = value
        .as_table_mut()
        .ok_or_else(|| Error::config("<toml>", "config must be a table"))?;
    let table = root
        .entry("tolerances")
        .or_insert_with(|| toml::Value::Table(Default::default()))
        .as_table_mut()
        .ok_or_else(|| Error::config("tolerances", "must be a table"))?;
    table.insert(key.to_string(), toml::Value::Float(number));
    Ok(())
}

impl Tolerances {
    pub const KEYS: [&'static str; 10] = [
        "stone",
        "routes",
        "krein",
        "friedel",
        "levinson",
        "tail",
        "fit_fraction",
        "box_doubling",
        "cauchy_fraction",
        "contraction",
    ];
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 6] = ["zero", "stone", "gaussian-1d", "square-well-1d", "square-well-3d", "probes"];

fn base(name: &str, dimension: usize, half_width: f64, points: usize, shape: Shape, energies: EnergySpec) -> ExperimentConfig {
    ExperimentConfig {
        experiment: ExperimentSection {
            name: name.into(),
            dimension,
            seed: default_seed(),
        },
        grid: GridSection { half_width, points },
        potential: PotentialSection {
            shape,
            center: 0.0,
            alpha: default_alpha(),
            constant: None,
            samples: default_samples(),
        },
        transform: TransformSection::default(),
        ssf: SsfSection {
            energies,
            eta: EtaSchedule::level_spacing_default(),
            tolerance: default_spread(),
            routes: default_routes(),
        },
        excess: ExcessSection::default(),
        scattering: ScatteringSection::default(),
        probes: ProbesSection::default(),
        krein: KreinSection::default(),
        tolerances: Tolerances::default(),
        output: OutputSection::default(),
    }
}

fn range(start: f64, stop: f64, count: usize) -> EnergySpec {
    EnergySpec::Range(EnergyRange { start, stop, count })
}

fn heat_and_bump() -> Vec<TestFunction> {
    vec![
        TestFunction::HeatKernel { time: 0.2 },
        TestFunction::HeatKernel { time: 0.5 },
        TestFunction::HeatKernel { time: 1.0 },
        TestFunction::Bump {
            center: 1.0,
            half_width: 2.0,
        },
        TestFunction::Bump {
            center: 3.0,
            half_width: 1.5,
        },
    ]
}

/// Built-in configurations.
///
/// * `zero`: free pair, every route must vanish.
/// * `stone`: fixed grid `L = 20`, `N = 2000`, gaussian well `V₀ = -1`,
///   gap-tied η so the limit is the exact counting difference.
/// * `gaussian-1d`: `L = 100`, `N = 8000`, the sum-rule preset on the line.
/// * `square-well-1d`: `V₀ = -4`, `a = 1`, `L = 100`, `N = 7999` (the well
///   edge is a node), Krein battery of heat kernels and bumps.
/// * `square-well-3d`: radial partial waves, `L = 200`, `N = 7999`.
/// * `probes`: small gaussian grids for the operator-level probes.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let gaussian = Shape::Gaussian {
        depth: -1.0,
        range: 1.0,
    };
    let well = Shape::SquareWell {
        depth: -4.0,
        range: 1.0,
    };
    let mut c = match name {
        "zero" => {
            let mut c = base(name, 1, 20.0, 400, Shape::Zero, range(0.25, 4.0, 8));
            c.excess.radii = vec![1.0, 2.0, 4.0, 8.0];
            c.krein.functions = heat_and_bump();
            c
        }
        "stone" => {
            // Twenty energies, mostly off the spectrum by construction of
            // the gap-tied schedule; two sit below zero.
            let mut c = base(name, 1, 20.0, 2000, gaussian, range(-0.3, 4.45, 20));
            c.ssf.eta = EtaSchedule::gap_default();
            c.excess.radii = vec![1.0, 2.0, 4.0, 8.0];
            c.ssf.tolerance = 1e-3;
            c.krein.functions = heat_and_bump();
            c
        }
        "gaussian-1d" => base(
            name,
            1,
            100.0,
            8000,
            gaussian,
            EnergySpec::List(vec![0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0]),
        ),
        "square-well-1d" => {
            let mut c = base(name, 1, 100.0, 7999, well, range(0.2, 5.0, 13));
            c.krein.functions = heat_and_bump();
            c
        }
        "square-well-3d" => {
            let mut c = base(name, 3, 200.0, 7999, well, range(0.25, 4.0, 8));
            c.tolerances.friedel = 0.08;
            c
        }
        "probes" => {
            let mut c = base(name, 1, 10.0, 399, gaussian, EnergySpec::List(vec![1.0]));
            c.probes.beta = Some(2.5);
            c.excess.radii = vec![0.5, 1.0, 2.0, 4.0];
            c
        }
        other => {
            return Err(Error::config(
                "--preset",
                format!("unknown preset `{other}`; choose one of {}", PRESETS.join(", ")),
            ))
        }
    };
    c.output.dir = None;
    c.validate()?;
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate_and_round_trip() {
        for name in PRESETS {
            let c = preset(name).unwrap();
            let text = c.to_toml_string().unwrap();
            let back = ExperimentConfig::from_toml_str(&text, &[]).unwrap();
            assert_eq!(back, c, "{name}");
            assert_eq!(back.hash(), c.hash());
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = preset("zero").unwrap().to_toml_string().unwrap();
        text.push_str("\n[bogus]\nx = 1\n");
        let err = ExperimentConfig::from_toml_str(&text, &[]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let text = preset("zero").unwrap().to_toml_string().unwrap().replace("seed = 7", "seed = 7\nsed = 1");
        assert!(ExperimentConfig::from_toml_str(&text, &[]).is_err());
    }

    #[test]
    fn small_shift_names_the_invariant() {
        let mut c = preset("stone").unwrap();
        c.transform.shift = Some(0.8);
        let err = c.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("transform.shift") && msg.contains("M > 1 + max(0, -inf σ(H))"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn overrides_touch_only_tolerances() {
        let c = preset("gaussian-1d").unwrap();
        let d = c.with_overrides(&["friedel=0.07".into(), "tolerances.krein=2e-3".into()]).unwrap();
        assert_eq!(d.tolerances.friedel, 0.07);
        assert_eq!(d.tolerances.krein, 2e-3);
        assert_ne!(c.hash(), d.hash());
        assert!(c.with_overrides(&["nonsense=1".into()]).is_err());
        assert!(c.with_overrides(&["friedel".into()]).is_err());
        assert!(c.with_overrides(&["friedel=abc".into()]).is_err());
    }

    #[test]
    fn box_guard_and_window() {
        let mut c = preset("gaussian-1d").unwrap();
        c.excess.radii = vec![5.0, 50.0];
        assert!(c.validate().unwrap_err().to_string().contains("excess.radii"));
        let mut c = preset("probes").unwrap();
        c.probes.beta = Some(3.6);
        assert!(c.validate().unwrap_err().to_string().contains("probes.beta"));
    }

    #[test]
    fn energy_range_expands() {
        let e = range(0.25, 4.0, 8).values();
        assert_eq!(e.len(), 8);
        assert_eq!(e[0], 0.25);
        assert_eq!(e[7], 4.0);
    }
}
