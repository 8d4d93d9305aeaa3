//! JSON run configurations, one struct per subcommand.
//!
//! Unknown keys are rejected everywhere so a typo in a config fails fast
//! with exit code 3 instead of silently running defaults.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

impl Default for OutputFormat {
    fn default() -> Self {
        OutputFormat::Json
    }
}

/// Top-level run configuration: tagged by `cmd`.
#[derive(Debug, Deserialize)]
#[serde(tag = "cmd", deny_unknown_fields, rename_all = "kebab-case")]
pub enum RunConfig {
    ChernC1(ChernC1Config),
    ChernC2(ChernC2Config),
    Hopf(HopfConfig),
    CsValue(CsValueConfig),
    CsShift(CsShiftConfig),
    MapDegree(MapDegreeConfig),
    RepvarSolve(RepvarSolveConfig),
    RepvarDim(RepvarDimConfig),
    Holonomy(HolonomyConfig),
    Flow(FlowConfig),
    DiracSpectrum(DiracSpectrumConfig),
    DiracIndex(DiracIndexConfig),
    Weitzenboeck(WeitzenboeckConfig),
    SwCheck(SwCheckConfig),
    SwDescent(SwDescentConfig),
    SwDim(SwDimConfig),
    Degree(DegreeConfig),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::ChernC1(_) => "chern-c1",
            RunConfig::ChernC2(_) => "chern-c2",
            RunConfig::Hopf(_) => "hopf",
            RunConfig::CsValue(_) => "cs-value",
            RunConfig::CsShift(_) => "cs-shift",
            RunConfig::MapDegree(_) => "map-degree",
            RunConfig::RepvarSolve(_) => "repvar-solve",
            RunConfig::RepvarDim(_) => "repvar-dim",
            RunConfig::Holonomy(_) => "holonomy",
            RunConfig::Flow(_) => "flow",
            RunConfig::DiracSpectrum(_) => "dirac-spectrum",
            RunConfig::DiracIndex(_) => "dirac-index",
            RunConfig::Weitzenboeck(_) => "weitzenboeck",
            RunConfig::SwCheck(_) => "sw-check",
            RunConfig::SwDescent(_) => "sw-descent",
            RunConfig::SwDim(_) => "sw-dim",
            RunConfig::Degree(_) => "degree",
        }
    }

    pub fn out(&self) -> Option<&str> {
        let out = match self {
            RunConfig::ChernC1(c) => &c.out,
            RunConfig::ChernC2(c) => &c.out,
            RunConfig::Hopf(c) => &c.out,
            RunConfig::CsValue(c) => &c.out,
            RunConfig::CsShift(c) => &c.out,
            RunConfig::MapDegree(c) => &c.out,
            RunConfig::RepvarSolve(c) => &c.out,
            RunConfig::RepvarDim(c) => &c.out,
            RunConfig::Holonomy(c) => &c.out,
            RunConfig::Flow(c) => &c.out,
            RunConfig::DiracSpectrum(c) => &c.out,
            RunConfig::DiracIndex(c) => &c.out,
            RunConfig::Weitzenboeck(c) => &c.out,
            RunConfig::SwCheck(c) => &c.out,
            RunConfig::SwDescent(c) => &c.out,
            RunConfig::SwDim(c) => &c.out,
            RunConfig::Degree(c) => &c.out,
        };
        out.as_deref()
    }
}

fn default_grid_n() -> usize {
    32
}
fn default_hopf_n() -> usize {
    256
}
fn default_tol() -> f64 {
    1e-10
}
fn default_max_steps() -> usize {
    20_000
}
fn default_seed() -> u64 {
    0
}
fn default_wilson_r() -> f64 {
    1.0
}
fn default_grid_density() -> usize {
    32
}

/// First Chern number of a U(1) field on T²: either the constant-flux
/// field (`flux`) or a seeded random field (`roughness`).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernC1Config {
    pub n: usize,
    #[serde(default)]
    pub flux: Option<i64>,
    #[serde(default)]
    pub roughness: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChernC2Config {
    pub n: usize,
    #[serde(default)]
    pub m01: i64,
    #[serde(default)]
    pub m02: i64,
    #[serde(default)]
    pub m03: i64,
    #[serde(default)]
    pub m12: i64,
    #[serde(default)]
    pub m13: i64,
    #[serde(default)]
    pub m23: i64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HopfConfig {
    #[serde(default = "default_hopf_n")]
    pub n: usize,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormPreset {
    Zero,
    LambdaTheta,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapPreset {
    Const,
    IdMap,
    IdSquared,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsValueConfig {
    pub preset: FormPreset,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_grid_n")]
    pub resolution: usize,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsShiftConfig {
    pub gauge: MapPreset,
    #[serde(default)]
    pub amplitude: Option<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_grid_n")]
    pub resolution: usize,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDegreeConfig {
    pub map: MapPreset,
    #[serde(default = "default_grid_n")]
    pub resolution: usize,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationConfig {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupName {
    U1,
    Su2,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepvarSolveConfig {
    pub group: GroupName,
    /// Inline presentation, or one of the presets "torus", "genus2",
    /// "free-n".
    #[serde(default)]
    pub presentation: Option<PresentationConfig>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepvarDimConfig {
    pub group: GroupName,
    #[serde(default)]
    pub presentation: Option<PresentationConfig>,
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Monodromy of a flat field built from torus holonomies (angles for U(1),
/// algebra vectors for SU(2)).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HolonomyConfig {
    pub group: GroupName,
    pub n: usize,
    pub dim: usize,
    /// One algebra vector per axis: 1 entry (U(1)) or 3 entries (SU(2)).
    pub holonomies: Vec<Vec<f64>>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub group: GroupName,
    pub n: usize,
    #[serde(default = "two")]
    pub dim: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub roughness: f64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_step")]
    pub step: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn two() -> usize {
    2
}
fn default_step() -> f64 {
    0.05
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracSpectrumConfig {
    pub n: usize,
    pub flux: i64,
    #[serde(default = "default_wilson_r")]
    pub r: f64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_k() -> usize {
    12
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiracIndexConfig {
    pub n: usize,
    pub flux: i64,
    #[serde(default = "default_wilson_r")]
    pub r: f64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeitzenboeckConfig {
    pub n: usize,
    pub flux: i64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Property checks (equivariance, quartic identity, slice adjointness,
/// deformation residual) on seeded random configurations.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwCheckConfig {
    #[serde(default = "three")]
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub eta: Option<[f64; 3]>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn three() -> usize {
    3
}
fn default_pairs() -> usize {
    10
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwDescentConfig {
    #[serde(default = "three")]
    pub n: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_psi_amp")]
    pub psi_amplitude: f64,
    #[serde(default = "default_alpha_amp")]
    pub alpha_amplitude: f64,
    #[serde(default)]
    pub eta: Option<[f64; 3]>,
    #[serde(default = "default_sw_steps")]
    pub max_steps: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

fn default_psi_amp() -> f64 {
    1e-5
}
fn default_alpha_amp() -> f64 {
    1e-2
}
fn default_sw_steps() -> usize {
    60_000
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwDimConfig {
    pub c1sq: i64,
    pub chi: i64,
    pub sigma: i64,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialMapConfig {
    pub box_radius: f64,
    /// components[i] is a list of (coefficient, exponent-vector) terms.
    pub components: Vec<Vec<(f64, Vec<u32>)>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeConfig {
    /// Built-in map name ("cubic", "identity-1", "identity-2", "square")
    /// or an inline polynomial table.
    #[serde(default)]
    pub map: Option<String>,
    #[serde(default)]
    pub polynomial: Option<PolynomialMapConfig>,
    pub y: Vec<f64>,
    #[serde(default = "default_grid_density")]
    pub grid_density: usize,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}
