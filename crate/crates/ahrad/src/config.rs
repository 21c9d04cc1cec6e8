//! Run configuration: JSON blocks for the metric, grid, data and per-experiment settings.

use std::f64::consts::PI;

use ahrad_core::{Bump, Cutoff, DataSpec, GridSpec, Mode, Profile, WarpedMetric, C64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Pipeline selected on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Evolve,
    Field,
    Scatter,
    Invert,
    OracleH3,
    Recover,
    Convergence,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::Field => "field",
            Experiment::Scatter => "scatter",
            Experiment::Invert => "invert",
            Experiment::OracleH3 => "oracle-h3",
            Experiment::Recover => "recover",
            Experiment::Convergence => "convergence",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileName {
    Hyperbolic,
    Funnel,
    Bump,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CutoffConfig {
    pub center: f64,
    pub width: f64,
}

/// `{"profile": "funnel", "a": 0.1, "n": 1, "L": 6.283185307179586, "x_max": 1.0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub profile: ProfileName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    pub n: usize,
    #[serde(rename = "L")]
    pub period: f64,
    pub x_max: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<CutoffConfig>,
}

impl MetricConfig {
    pub fn hyperbolic(n: usize) -> Self {
        MetricConfig {
            profile: ProfileName::Hyperbolic,
            a: None,
            n,
            period: 2.0 * PI,
            x_max: 1.0,
            center: None,
            width: None,
            cutoff: None,
        }
    }

    pub fn funnel(a: f64) -> Self {
        MetricConfig { profile: ProfileName::Funnel, a: Some(a), ..Self::hyperbolic(1) }
    }

    pub fn bump(a: f64) -> Self {
        MetricConfig { profile: ProfileName::Bump, a: Some(a), ..Self::hyperbolic(1) }
    }

    /// Builds the model; `path` prefixes error locations.
    pub fn build(&self, path: &str) -> Result<WarpedMetric> {
        let at = |f: &str| format!("{path}.{f}");
        let cutoff = self.cutoff.map(|c| Cutoff { center: c.center, width: c.width }).unwrap_or_default();
        let amp = || self.a.ok_or_else(|| Error::config(at("a"), "required for this profile"));
        let profile = match self.profile {
            ProfileName::Hyperbolic => {
                if self.a.is_some() {
                    return Err(Error::config(at("a"), "hyperbolic profile takes no amplitude"));
                }
                Profile::Hyperbolic
            }
            ProfileName::Funnel => Profile::Funnel { a: amp()?, cutoff },
            ProfileName::Bump => {
                let Profile::Bump { center, width, .. } = Profile::bump(0.0) else { unreachable!() };
                Profile::Bump {
                    a: amp()?,
                    center: self.center.unwrap_or(center),
                    width: self.width.unwrap_or(width),
                    cutoff,
                }
            }
        };
        if self.n != 1 && self.n != 2 {
            return Err(Error::config(at("n"), format!("must be 1 or 2, got {}", self.n)));
        }
        if !(self.period > 0.0) {
            return Err(Error::config(at("L"), "must be positive"));
        }
        if !(self.x_max > 0.0) {
            return Err(Error::config(at("x_max"), "must be positive"));
        }
        WarpedMetric::new(profile, self.n, self.period, self.x_max).map_err(|e| Error::config(path, e.to_string()))
    }
}

/// Characteristic step, s-window and mode cutoff.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub delta: f64,
    pub s_max: f64,
    pub ds: f64,
    pub k_max: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
}

impl GridConfig {
    /// Symmetric window [−s_max, s_max] with the default march height.
    pub fn new(delta: f64, s_max: f64, ds: f64, k_max: i32) -> Self {
        GridConfig { delta, s_max, ds, k_max, s_min: None, t_max: None }
    }

    pub fn spec(&self) -> GridSpec {
        let mut g = GridSpec::symmetric(self.delta, self.s_max, self.ds, self.k_max);
        if let Some(s) = self.s_min {
            g.s_min = s;
        }
        if let Some(t) = self.t_max {
            g.t_max = t;
        }
        g
    }

    pub fn build(&self, m: &WarpedMetric) -> Result<GridSpec> {
        for (f, v) in [("delta", self.delta), ("ds", self.ds), ("s_max", self.s_max)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("grid.{f}"), "must be positive and finite"));
            }
        }
        if self.k_max < 0 {
            return Err(Error::config("grid.k_max", "must be non-negative"));
        }
        let g = self.spec();
        g.validate(m).map_err(|e| Error::config("grid", e.to_string()))?;
        Ok(g)
    }
}

/// A mode index: `3` or `[1, -2]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModeKey {
    One(i32),
    Two([i32; 2]),
}

impl ModeKey {
    pub fn mode(self) -> Mode {
        match self {
            ModeKey::One(k) => Mode::one(k),
            ModeKey::Two([a, b]) => Mode::two(a, b),
        }
    }
}

/// a·b((x − center)/half_width) with a = re + i·im.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BumpConfig {
    pub center: f64,
    pub half_width: f64,
    #[serde(default = "one")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn one() -> f64 {
    1.0
}

impl BumpConfig {
    pub fn new(center: f64, half_width: f64) -> Self {
        BumpConfig { center, half_width, re: 1.0, im: 0.0 }
    }

    pub fn bump(&self) -> Bump {
        Bump { center: self.center, half_width: self.half_width, amplitude: C64::new(self.re, self.im) }
    }
}

/// Bumps for f₁ and f₂ on one mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub k: ModeKey,
    #[serde(default)]
    pub f1: Vec<BumpConfig>,
    #[serde(default)]
    pub f2: Vec<BumpConfig>,
}

/// Seeded random bump data sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomData {
    pub sets: usize,
    #[serde(default = "default_random_modes")]
    pub modes: Vec<ModeKey>,
    #[serde(default = "default_random_center")]
    pub center: [f64; 2],
    #[serde(default = "default_random_width")]
    pub half_width: [f64; 2],
}

fn default_random_modes() -> Vec<ModeKey> {
    vec![ModeKey::One(0), ModeKey::One(1), ModeKey::One(2)]
}

fn default_random_center() -> [f64; 2] {
    [0.3, 0.55]
}

fn default_random_width() -> [f64; 2] {
    [0.12, 0.2]
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modes: Vec<ModeEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomData>,
}

impl DataConfig {
    pub fn single(entries: Vec<ModeEntry>) -> Self {
        DataConfig { modes: entries, random: None }
    }

    /// The explicit bumps as one data set, if any.
    pub fn explicit(&self) -> Option<DataSpec> {
        if self.modes.is_empty() {
            return None;
        }
        let modes = self
            .modes
            .iter()
            .map(|e| (e.k.mode(), e.f1.iter().map(|b| b.bump()).collect(), e.f2.iter().map(|b| b.bump()).collect()))
            .collect();
        Some(DataSpec { modes })
    }
}

/// Acceptance thresholds of the inline checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub unitarity: f64,
    pub translation: f64,
    pub finite_speed: f64,
    pub bound: f64,
    pub membership: f64,
    pub filter: f64,
    pub indicial: f64,
    pub tail: f64,
    pub scattering_agreement: f64,
    pub scattering_unitarity: f64,
    pub jump: f64,
    pub transport: f64,
    pub support_cells: f64,
    pub h3: f64,
    pub profile: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            unitarity: 0.02,
            translation: 0.02,
            finite_speed: 1e-12,
            bound: 1e-3,
            membership: 0.03,
            filter: 0.01,
            indicial: 1e-9,
            tail: 1e-6,
            scattering_agreement: 0.02,
            scattering_unitarity: 0.01,
            jump: 0.05,
            transport: 1e-6,
            support_cells: 5.0,
            h3: 0.03,
            profile: 0.03,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 15] {
        [
            ("unitarity", self.unitarity),
            ("translation", self.translation),
            ("finite_speed", self.finite_speed),
            ("bound", self.bound),
            ("membership", self.membership),
            ("filter", self.filter),
            ("indicial", self.indicial),
            ("tail", self.tail),
            ("scattering_agreement", self.scattering_agreement),
            ("scattering_unitarity", self.scattering_unitarity),
            ("jump", self.jump),
            ("transport", self.transport),
            ("support_cells", self.support_cells),
            ("h3", self.h3),
            ("profile", self.profile),
        ]
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in self.entries() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(format!("tolerances.{name}"), "must be positive and finite"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveConfig {
    pub tau: Vec<f64>,
    /// Largest t′ of the mode-field dump.
    pub dump_t_max: f64,
    /// Node stride of the mode-field dump.
    pub dump_stride: usize,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        EvolveConfig { tau: vec![0.1, 0.3], dump_t_max: 1.5, dump_stride: 5 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FourierConfig {
    pub points: usize,
    pub lambda_max: f64,
}

impl Default for FourierConfig {
    fn default() -> Self {
        FourierConfig { points: 512, lambda_max: 16.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterConfig {
    pub modes: Vec<ModeKey>,
    pub lambda_points: usize,
    pub lambda_max: f64,
    /// λ-range of the agreement and unitarity checks.
    pub window: [f64; 2],
    pub probe_f1: Vec<BumpConfig>,
    pub probe_f2: Vec<BumpConfig>,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        ScatterConfig {
            modes: vec![ModeKey::One(0), ModeKey::One(1), ModeKey::One(2), ModeKey::One(4)],
            lambda_points: 33,
            lambda_max: 8.0,
            window: [0.5, 8.0],
            probe_f1: vec![BumpConfig::new(0.3, 0.1)],
            probe_f2: vec![BumpConfig::new(0.35, 0.12)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InvertConfig {
    pub x1: Vec<f64>,
    /// Half-width of the s-mollifier φ.
    pub mollifier: f64,
    pub transport_steps: usize,
}

impl Default for InvertConfig {
    fn default() -> Self {
        InvertConfig { x1: vec![0.1, 0.2, 0.3], mollifier: 0.05, transport_steps: 2000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Equal,
    Differ,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecoverConfig {
    /// Second metric, compared against `metric`.
    pub compare: MetricConfig,
    #[serde(default = "default_ladder")]
    pub x1: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
    #[serde(default = "default_mollifier")]
    pub mollifier: f64,
}

fn default_ladder() -> Vec<f64> {
    vec![0.1, 0.15, 0.2]
}

fn default_mollifier() -> f64 {
    0.05
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct H3Config {
    /// (center, half-width) of the x, y₁ and y₂ factors.
    pub x: [f64; 2],
    pub y1: [f64; 2],
    pub y2: [f64; 2],
    pub amplitude: f64,
    /// First s sample, spacing and count.
    pub s_start: f64,
    pub s_step: f64,
    pub s_count: usize,
    /// Torus sample points per side.
    pub y_points: usize,
    pub panels: usize,
    pub order: usize,
    pub step: f64,
}

impl Default for H3Config {
    fn default() -> Self {
        H3Config {
            x: [0.3, 0.1],
            y1: [PI, 3.0],
            y2: [PI, 3.0],
            amplitude: 1.0,
            s_start: -1.4,
            s_step: 0.3,
            s_count: 8,
            y_points: 8,
            panels: 8,
            order: 8,
            step: 2e-3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceConfig {
    pub levels: usize,
    pub min_field_order: f64,
    pub min_defect_order: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig { levels: 3, min_field_order: 1.9, min_defect_order: 1.5 }
    }
}

/// Complete run description; serializes back to an equal value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    pub metric: MetricConfig,
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub evolve: EvolveConfig,
    #[serde(default)]
    pub fourier: FourierConfig,
    #[serde(default)]
    pub scatter: ScatterConfig,
    #[serde(default)]
    pub invert: InvertConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recover: Option<RecoverConfig>,
    #[serde(default)]
    pub h3: H3Config,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
}

const REQUIRED_BLOCKS: [&str; 2] = ["metric", "grid"];

impl RunConfig {
    pub fn new(metric: MetricConfig, grid: GridConfig) -> Self {
        RunConfig {
            experiment: None,
            metric,
            grid,
            data: None,
            tolerances: Tolerances::default(),
            output: None,
            seed: 0,
            evolve: EvolveConfig::default(),
            fourier: FourierConfig::default(),
            scatter: ScatterConfig::default(),
            invert: InvertConfig::default(),
            recover: None,
            h3: H3Config::default(),
            convergence: ConvergenceConfig::default(),
        }
    }

    /// Parses and validates JSON text.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::config("", format!("not valid JSON: {e}")))?;
        let obj = value.as_object().ok_or_else(|| Error::config("", "top level must be an object"))?;
        for block in REQUIRED_BLOCKS {
            if !obj.contains_key(block) {
                return Err(Error::config(block, "missing block"));
            }
        }
        let cfg: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let parent = e.path().to_string();
            let reason = e.inner().to_string();
            Error::config(error_path(&parent, &reason), reason)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Semantic checks beyond the JSON schema.
    pub fn validate(&self) -> Result<()> {
        let m = self.metric.build("metric")?;
        self.grid.build(&m)?;
        self.tolerances.validate()?;
        if let Some(d) = &self.data {
            self.validate_data(d, &m)?;
        }
        if let Some(r) = &self.recover {
            r.compare.build("recover.compare")?;
            positive_list("recover.x1", &r.x1)?;
            positive("recover.mollifier", r.mollifier)?;
        }
        positive_list("invert.x1", &self.invert.x1)?;
        positive("invert.mollifier", self.invert.mollifier)?;
        if self.evolve.dump_stride == 0 {
            return Err(Error::config("evolve.dump_stride", "must be at least 1"));
        }
        if self.fourier.points < 2 {
            return Err(Error::config("fourier.points", "need at least 2 points"));
        }
        positive("fourier.lambda_max", self.fourier.lambda_max)?;
        positive("scatter.lambda_max", self.scatter.lambda_max)?;
        if self.scatter.lambda_points < 2 {
            return Err(Error::config("scatter.lambda_points", "need at least 2 points"));
        }
        if !(self.scatter.window[0] < self.scatter.window[1]) {
            return Err(Error::config("scatter.window", "lower end must be below upper end"));
        }
        for (f, v) in [("panels", self.h3.panels), ("order", self.h3.order), ("y_points", self.h3.y_points)] {
            if v == 0 {
                return Err(Error::config(format!("h3.{f}"), "must be at least 1"));
            }
        }
        positive("h3.step", self.h3.step)?;
        positive("h3.s_step", self.h3.s_step)?;
        Ok(())
    }

    fn validate_data(&self, d: &DataConfig, m: &WarpedMetric) -> Result<()> {
        for (i, e) in d.modes.iter().enumerate() {
            for (part, bumps) in [("f1", &e.f1), ("f2", &e.f2)] {
                for (j, b) in bumps.iter().enumerate() {
                    let at = format!("data.modes[{i}].{part}[{j}]");
                    positive(&format!("{at}.half_width"), b.half_width)?;
                    if b.center + b.half_width >= m.x_max {
                        return Err(Error::config(at, "bump reaches the cap"));
                    }
                }
            }
        }
        if let Some(r) = &d.random {
            let [c0, c1] = r.center;
            let [w0, w1] = r.half_width;
            if !(0.0 < w0 && w0 <= w1) {
                return Err(Error::config("data.random.half_width", "need 0 < min ≤ max"));
            }
            if !(c0 <= c1 && c0 - w1 > 0.0 && c1 + w1 < m.x_max) {
                return Err(Error::config("data.random.center", "bumps must stay inside (0, x_max)"));
            }
            if r.modes.is_empty() {
                return Err(Error::config("data.random.modes", "need at least one mode"));
            }
        }
        Ok(())
    }

    pub fn metric(&self) -> Result<WarpedMetric> {
        self.metric.build("metric")
    }

    pub fn grid_spec(&self) -> Result<GridSpec> {
        self.grid.build(&self.metric()?)
    }

    pub fn data(&self) -> Result<&DataConfig> {
        self.data.as_ref().ok_or_else(|| Error::config("data", "missing block"))
    }

    pub fn recover(&self) -> Result<&RecoverConfig> {
        self.recover.as_ref().ok_or_else(|| Error::config("recover", "missing block"))
    }
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(path, "must be positive and finite"))
    }
}

fn positive_list(path: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::config(path, "must not be empty"));
    }
    for (i, &x) in v.iter().enumerate() {
        positive(&format!("{path}[{i}]"), x)?;
    }
    Ok(())
}

/// Joins the parent path of a deserialization error with a field named in its message.
fn error_path(parent: &str, reason: &str) -> String {
    let named = ["missing field `", "unknown field `"]
        .iter()
        .find_map(|p| reason.strip_prefix(p))
        .and_then(|rest| rest.split('`').next());
    match (parent, named) {
        (".", Some(f)) | ("", Some(f)) => f.to_string(),
        (p, Some(f)) if p == f || p.ends_with(&format!(".{f}")) => p.to_string(),
        (p, Some(f)) => format!("{p}.{f}"),
        (".", None) => String::new(),
        (p, None) => p.to_string(),
    }
}
