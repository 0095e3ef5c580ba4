//! Run configuration: JSON in, resolved parameter set out.
//!
//! Lengths are in units of the scatterer size `a`, so every medium is specified through the
//! dimensionless groups `ka`, `d/a`, `a gamma`, `a^2 alpha` or `alpha/k^2`.

use std::fmt;
use std::path::Path;

use ptscatter::born::Normalization;
use ptscatter::geometry::ScatteringGeometry;
use ptscatter::media::DEFAULT_V_NODES;
use ptscatter::presets::{default_coherence_grid_deg, Figure, FigurePreset};
use ptscatter::{BochnerModel, ClassicQuadratic, IncidentPlaneWave, MediumModel, PtSchellLinear, UnitDir, Vec3};
use serde::{Deserialize, Serialize};

/// Failure to read or interpret a configuration. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Preset label; set by `--figure` and used to name output files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub medium: Option<MediumSpec>,
    #[serde(default = "one")]
    pub ka: f64,
    #[serde(default = "one")]
    pub i0: f64,
    /// Incident direction; normalized on use.
    #[serde(default = "z_axis")]
    pub incident: [f64; 3],
    #[serde(default)]
    pub scan: ScanSpec,
    #[serde(default)]
    pub normalization: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceSpec>,
    #[serde(default)]
    pub validate: ValidateSpec,
    #[serde(default)]
    pub realize: RealizeSpec,
    #[serde(default)]
    pub seed: u64,
    /// Cross-check results against the quadrature and Monte-Carlo oracles.
    /// Defaults to on for `validate` and off elsewhere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<bool>,
    /// Output directory. Not echoed into outputs, so moving a run does not change its bytes.
    #[serde(default, skip_serializing)]
    pub output: Option<String>,
    /// Also write a gnuplot script next to each data file.
    #[serde(default)]
    pub gnuplot: bool,
    #[serde(default, skip_serializing_if = "TestHooks::is_default")]
    pub test_hooks: TestHooks,
}

fn one() -> f64 {
    1.0
}

fn z_axis() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}

fn zero3() -> [f64; 3] {
    [0.0; 3]
}

fn default_v_nodes() -> usize {
    DEFAULT_V_NODES
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MediumSpec {
    /// Gaussian Schell medium with linear phases. Give `a_gamma`, or `a_alpha` and `a_beta`.
    PtSchell {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_over_a: Option<f64>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        deterministic: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a_gamma: Option<[f64; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a_alpha: Option<[f64; 3]>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a_beta: Option<[f64; 3]>,
    },
    /// Gaussian Schell medium with a quadratic realization phase. Give `alpha_over_k2` or `a2_alpha`.
    Classic {
        d_over_a: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha_over_k2: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a2_alpha: Option<f64>,
    },
    /// Spectral (Bochner) form of the linear-phase medium on a discrete `v` grid.
    BochnerPt {
        d_over_a: f64,
        #[serde(default = "zero3")]
        a_alpha: [f64; 3],
        #[serde(default = "zero3")]
        a_beta: [f64; 3],
        #[serde(default = "default_v_nodes")]
        v_nodes: usize,
    },
    /// Classic medium with even realizations, `H = a(r) cos(2 pi r . v)`.
    EvenCosine {
        d_over_a: f64,
        #[serde(default)]
        a2_phase: f64,
        #[serde(default = "default_v_nodes")]
        v_nodes: usize,
    },
}

/// Either an explicit list or an inclusive `start..=stop` range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range { start: f64, stop: f64, step: f64 },
    List(Vec<f64>),
}

/// `v` nodes per axis when a Schell medium is turned into a sampler.
pub const SAMPLING_V_NODES: usize = 9;

const MAX_GRID: usize = 1_000_000;

impl GridSpec {
    pub fn values(&self, what: &str) -> Result<Vec<f64>, ConfigError> {
        let v = match self {
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { start, stop, step } => {
                if !(start.is_finite() && stop.is_finite() && step.is_finite()) || *step <= 0.0 || stop < start {
                    return Err(bad(format!("{what}: range needs finite start <= stop and step > 0")));
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
                if n > MAX_GRID {
                    return Err(bad(format!("{what}: {n} points exceeds the limit of {MAX_GRID}")));
                }
                (0..n).map(|i| start + step * i as f64).collect()
            }
        };
        if v.is_empty() {
            return Err(bad(format!("{what}: grid is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) || v.windows(2).any(|w| w[1] <= w[0]) {
            return Err(bad(format!("{what}: values must be finite and strictly increasing")));
        }
        Ok(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_deg: Option<GridSpec>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormSpec {
    Absolute,
    Peak,
    #[default]
    PositionDependent,
}

impl From<NormSpec> for Normalization {
    fn from(n: NormSpec) -> Self {
        match n {
            NormSpec::Absolute => Normalization::Absolute,
            NormSpec::Peak => Normalization::PeakNormalized,
            NormSpec::PositionDependent => Normalization::PositionDependent,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoherenceSpec {
    pub alpha_over_k2: f64,
    pub d_over_a: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ValidateSpec {
    /// Random direction pairs for the realness, swap and quadrature checks.
    pub probes: usize,
    pub mc_realizations: usize,
    pub mc_pairs: usize,
    pub psd_points: usize,
    /// `v` nodes per axis when a Schell medium is sampled.
    pub v_nodes: usize,
}

impl Default for ValidateSpec {
    fn default() -> Self {
        ValidateSpec { probes: 50, mc_realizations: 2000, mc_pairs: 20, psd_points: 50, v_nodes: SAMPLING_V_NODES }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RealizeSpec {
    /// Realization files to write.
    pub count: usize,
    /// Realizations in the ensemble summary.
    pub ensemble: usize,
    /// Points per axis of the centred cubic grid.
    pub grid_points: usize,
    pub half_width: f64,
    pub v_nodes: usize,
    /// Points `r` at which `I(r)`, `N(r)` and `mu(-r, r)` are estimated.
    pub points: Vec<[f64; 3]>,
}

impl Default for RealizeSpec {
    fn default() -> Self {
        RealizeSpec {
            count: 4,
            ensemble: 1000,
            grid_points: 9,
            half_width: 1.0,
            v_nodes: SAMPLING_V_NODES,
            points: vec![[0.0, 0.0, 0.0], [0.3, 0.2, -0.1], [0.5, 0.0, 0.0]],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestHooks {
    /// Evaluate the realization phase `i gamma . r_d` without its imaginary unit inside the
    /// quadrature oracle. Negative control for `validate`.
    pub drop_phase_unit: bool,
}

impl TestHooks {
    fn is_default(&self) -> bool {
        *self == TestHooks::default()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Spectrum,
    Coherence,
    Validate,
    Realize,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Coherence => "coherence",
            Command::Validate => "validate",
            Command::Realize => "realize",
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let at = if path.is_empty() || path == "." { String::new() } else { format!(" at `{path}`") };
            bad(format!("config{at}: {inner}"))
        })?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// The run described by a figure preset. Everything else keeps its default.
    pub fn from_figure(fig: Figure, cmd: Command) -> Result<Self, ConfigError> {
        let mut cfg = Self::from_json("{}")?;
        cfg.figure = Some(fig.name().to_string());
        match (fig.preset(), cmd) {
            (FigurePreset::Spectrum(p), Command::Spectrum | Command::Validate | Command::Realize) => {
                cfg.ka = p.ka;
                cfg.medium = Some(MediumSpec::PtSchell {
                    d_over_a: Some(p.d_over_a),
                    deterministic: false,
                    a_gamma: Some(p.a_gamma),
                    a_alpha: None,
                    a_beta: None,
                });
            }
            (FigurePreset::Coherence(p), Command::Coherence) => {
                cfg.ka = p.ka;
                cfg.coherence = Some(CoherenceSpec { alpha_over_k2: p.alpha_over_k2, d_over_a: p.d_over_a });
            }
            (FigurePreset::Spectrum(_), Command::Coherence) => {
                return Err(bad(format!("{} is a spectral-density map; use `spectrum`", fig.name())))
            }
            (FigurePreset::Coherence(_), _) => {
                return Err(bad(format!("{} is a coherence scan; use `coherence`", fig.name())))
            }
        }
        Ok(cfg)
    }

    /// Fill command-dependent defaults so the echoed parameter set is complete.
    pub fn resolve_defaults(&mut self, cmd: Command) {
        if self.oracle.is_none() {
            self.oracle = Some(cmd == Command::Validate);
        }
        match cmd {
            Command::Spectrum => {
                self.scan.theta_deg.get_or_insert(GridSpec::Range { start: 0.0, stop: 180.0, step: 1.0 });
                self.scan.phi_deg.get_or_insert(GridSpec::Range { start: 0.0, stop: 359.0, step: 1.0 });
            }
            Command::Coherence => {
                let g = default_coherence_grid_deg();
                self.scan.theta_deg.get_or_insert(GridSpec::Range {
                    start: g[0],
                    stop: g[g.len() - 1],
                    step: g[1] - g[0],
                });
            }
            Command::Validate | Command::Realize => {}
        }
    }

    pub fn oracle_on(&self) -> bool {
        self.oracle.unwrap_or(false)
    }

    pub fn check_common(&self) -> Result<(), ConfigError> {
        if !(self.ka.is_finite() && self.ka > 0.0) {
            return Err(bad("ka must be finite and positive"));
        }
        if !(self.i0.is_finite() && self.i0 > 0.0) {
            return Err(bad("i0 must be finite and positive"));
        }
        Ok(())
    }

    pub fn wave(&self) -> Result<IncidentPlaneWave, ConfigError> {
        let s0 = UnitDir::new(Vec3::from_array(self.incident)).map_err(|e| bad(format!("incident: {e}")))?;
        let g = ScatteringGeometry::new(self.ka, s0).map_err(|e| bad(format!("ka: {e}")))?;
        IncidentPlaneWave::new(1.0, g).map_err(|e| bad(e.to_string()))
    }

    pub fn medium_spec(&self) -> Result<&MediumSpec, ConfigError> {
        self.medium.as_ref().ok_or_else(|| bad("config has no `medium`"))
    }

    /// The configured medium with `a = 1`.
    pub fn medium(&self) -> Result<MediumModel, ConfigError> {
        let i0 = self.i0;
        let wrap = |e: ptscatter::Error| bad(format!("medium: {e}"));
        let m: MediumModel = match self.medium_spec()? {
            MediumSpec::PtSchell { d_over_a, deterministic, a_gamma, a_alpha, a_beta } => {
                let (alpha, beta) = match (a_gamma, a_alpha, a_beta) {
                    (Some(g), None, None) => (*g, [0.0; 3]),
                    (None, Some(a), Some(b)) => (*a, *b),
                    (None, Some(a), None) => (*a, [0.0; 3]),
                    (None, None, Some(b)) => ([0.0; 3], *b),
                    (None, None, None) => return Err(bad("medium: pt_schell needs `a_gamma` or `a_alpha`/`a_beta`")),
                    _ => return Err(bad("medium: give either `a_gamma` or `a_alpha`/`a_beta`, not both")),
                };
                let (alpha, beta) = (Vec3::from_array(alpha), Vec3::from_array(beta));
                match (d_over_a, deterministic) {
                    (Some(d), false) => PtSchellLinear::new(i0, 1.0, *d, alpha, beta).map_err(wrap)?.into(),
                    (None, true) => PtSchellLinear::deterministic(i0, 1.0, alpha, beta).map_err(wrap)?.into(),
                    _ => {
                        return Err(bad("medium: pt_schell needs exactly one of `d_over_a` and `deterministic: true`"))
                    }
                }
            }
            MediumSpec::Classic { d_over_a, alpha_over_k2, a2_alpha } => {
                let alpha = match (alpha_over_k2, a2_alpha) {
                    (Some(r), None) => r * self.ka * self.ka,
                    (None, Some(x)) => *x,
                    _ => return Err(bad("medium: classic needs exactly one of `alpha_over_k2` and `a2_alpha`")),
                };
                ClassicQuadratic::new(i0, 1.0, *d_over_a, alpha).map_err(wrap)?.into()
            }
            MediumSpec::BochnerPt { d_over_a, a_alpha, a_beta, v_nodes } => {
                let m = PtSchellLinear::new(i0, 1.0, *d_over_a, Vec3::from_array(*a_alpha), Vec3::from_array(*a_beta))
                    .map_err(wrap)?;
                BochnerModel::from_pt_schell(&m, *v_nodes).map_err(wrap)?.into()
            }
            MediumSpec::EvenCosine { d_over_a, a2_phase, v_nodes } => {
                BochnerModel::even_cosine(i0, 1.0, *d_over_a, *a2_phase, *v_nodes).map_err(wrap)?.into()
            }
        };
        Ok(m)
    }

    /// The medium in sampleable form; Schell media are discretized with `v_nodes` per axis.
    pub fn bochner(&self, v_nodes: usize) -> Result<BochnerModel, ConfigError> {
        let wrap = |e: ptscatter::Error| bad(format!("medium: {e}"));
        match self.medium()? {
            MediumModel::PtSchell(m) => {
                if m.is_deterministic() {
                    return Err(bad("medium: a deterministic medium has no spectral representation to sample"));
                }
                BochnerModel::from_pt_schell(&m, v_nodes).map_err(wrap)
            }
            MediumModel::Classic(m) => BochnerModel::from_classic_quadratic(&m, v_nodes).map_err(wrap),
            MediumModel::Bochner(b) => Ok(b),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}
