use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::framecore::{DEFAULT_RANK_TOL, SampledFunction};
use crate::multiplication::{CheckKind, SweepQuantity, DEFAULT_LEVELS, DEFAULT_ZERO_TOL};
use crate::pointset::PointSetSpec;
use crate::translates::{BumpSpecWire, ConvolutionMode};

/// Schema problem in a config file; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("config error at '{path}': {message}")]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Density,
    Gap,
    FrameBounds,
    MultCheck,
    TranslateCheck,
    BuildGenerator,
    Reconstruct,
    UnionCheck,
    CorollaryDemo,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Density => "density",
            CommandKind::Gap => "gap",
            CommandKind::FrameBounds => "frame-bounds",
            CommandKind::MultCheck => "mult-check",
            CommandKind::TranslateCheck => "translate-check",
            CommandKind::BuildGenerator => "build-generator",
            CommandKind::Reconstruct => "reconstruct",
            CommandKind::UnionCheck => "union-check",
            CommandKind::CorollaryDemo => "corollary-demo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_n")]
    pub n_per_unit: usize,
    #[serde(default = "default_refine")]
    pub refine: Vec<usize>,
}

fn default_n() -> usize {
    256
}

fn default_refine() -> Vec<usize> {
    DEFAULT_LEVELS.to_vec()
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n_per_unit: default_n(),
            refine: default_refine(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    #[serde(default = "default_recon_tol")]
    pub recon_tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
}

fn default_rank_tol() -> f64 {
    DEFAULT_RANK_TOL
}
fn default_recon_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    2000
}
fn default_zero_tol() -> f64 {
    DEFAULT_ZERO_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_tol: default_rank_tol(),
            recon_tol: default_recon_tol(),
            max_iter: default_max_iter(),
            zero_tol: default_zero_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Where a point set comes from. File paths are relative to the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSource {
    /// One point per line.
    Csv(PathBuf),
    /// `{"dim", "box", "points"}`.
    Json(PathBuf),
    Inline(PointSetSpec),
    Lattice { start: f64, step: f64, count: usize },
    /// Unit lattice with seeded uniform jitter in `[-jitter, jitter]`.
    Jittered { start: f64, count: usize, jitter: f64 },
    /// `count` consecutive integers centred at zero.
    Integers(usize),
    /// `k / |I|` for `k = −N/2 .. N/2 − 1` on the single interval `I` of the
    /// grid: an orthonormal basis of the grid space after scaling.
    Fourier,
}

/// A function on the frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSource {
    /// Expression in `t`; see [`super::expr`].
    Expr(String),
    /// Rows `(t, re, im)` aligned to the grid nodes.
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityParams {
    pub points: PointSource,
    pub radii: Vec<f64>,
    /// `(a, r)` for the one-dimensional predicate `a < ν⁻(r) / 2r`.
    #[serde(default)]
    pub frame_predicate: Option<[f64; 2]>,
    /// Ball radius for the `r·ρ < 1/4` predicate.
    #[serde(default)]
    pub ball_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapParams {
    pub points: PointSource,
    #[serde(default)]
    pub ball_radius: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameBoundsParams {
    pub domain: DomainSpec,
    pub frequencies: PointSource,
    #[serde(default)]
    pub generator: Option<FunctionSource>,
    #[serde(default)]
    pub bessel_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultCheckParams {
    pub domain: DomainSpec,
    #[serde(default = "fourier")]
    pub base: PointSource,
    pub multiplier: FunctionSource,
    #[serde(default = "frame_check")]
    pub check: CheckKind,
    /// Quantity followed across `grid.refine`; defaults by check kind.
    #[serde(default)]
    pub sweep: Option<SweepQuantity>,
}

fn fourier() -> PointSource {
    PointSource::Fourier
}
fn frame_check() -> CheckKind {
    CheckKind::Frame
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslateCheckParams {
    pub domain: DomainSpec,
    pub frequencies: PointSource,
    pub generator: FunctionSource,
    /// Second generator for a convolution closure check.
    #[serde(default)]
    pub convolve_with: Option<FunctionSource>,
    #[serde(default)]
    pub convolution_mode: Option<ConvolutionMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildGeneratorParams {
    pub bump: BumpSpecWire,
    /// Time points at which `|g(x)|(1 + x²)` is reported.
    #[serde(default = "default_decay_points")]
    pub decay_points: Vec<f64>,
}

fn default_decay_points() -> Vec<f64> {
    vec![0.0, 1.0, 2.0, 5.0, 10.0, 20.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSource {
    /// `count` random band-limited signals with `terms` exponentials each.
    Random { count: usize, terms: usize },
    Function(FunctionSource),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructParams {
    pub bump: BumpSpecWire,
    pub base: PointSource,
    pub target_gap: f64,
    pub sep_min: f64,
    pub signal: SignalSource,
    /// Pass threshold on the relative residuals.
    #[serde(default = "default_pass_tol")]
    pub pass_tol: f64,
    #[serde(default = "default_perm_trials")]
    pub permutation_trials: usize,
    #[serde(default = "default_perm_tol")]
    pub permutation_tol: f64,
    #[serde(default = "yes")]
    pub outer_frame: bool,
}

fn default_pass_tol() -> f64 {
    1e-8
}
fn default_perm_trials() -> usize {
    3
}
fn default_perm_tol() -> f64 {
    1e-9
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnionPartParams {
    pub domain: DomainSpec,
    /// Expression for `ĥ_j`, cut off outside its domain.
    pub generator: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnionCheckParams {
    pub parts: Vec<UnionPartParams>,
    pub frequencies: PointSource,
    #[serde(default = "yes")]
    pub sweep: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorollaryParams {
    pub domain: DomainSpec,
    pub generator: String,
    #[serde(default = "default_control")]
    pub control: String,
    #[serde(default = "default_ratio_cap")]
    pub ratio_cap: f64,
}

fn default_control() -> String {
    "1".into()
}
fn default_ratio_cap() -> f64 {
    0.6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", content = "params", rename_all = "kebab-case")]
pub enum Command {
    Density(DensityParams),
    Gap(GapParams),
    FrameBounds(FrameBoundsParams),
    MultCheck(MultCheckParams),
    TranslateCheck(TranslateCheckParams),
    BuildGenerator(BuildGeneratorParams),
    Reconstruct(ReconstructParams),
    UnionCheck(UnionCheckParams),
    CorollaryDemo(CorollaryParams),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Command::Density(_) => CommandKind::Density,
            Command::Gap(_) => CommandKind::Gap,
            Command::FrameBounds(_) => CommandKind::FrameBounds,
            Command::MultCheck(_) => CommandKind::MultCheck,
            Command::TranslateCheck(_) => CommandKind::TranslateCheck,
            Command::BuildGenerator(_) => CommandKind::BuildGenerator,
            Command::Reconstruct(_) => CommandKind::Reconstruct,
            Command::UnionCheck(_) => CommandKind::UnionCheck,
            Command::CorollaryDemo(_) => CommandKind::CorollaryDemo,
        }
    }
}

/// Top-level config: `{"command", "params", "grid", "tolerances", "seed",
/// "output"}`. Everything except `command` and `params` has defaults.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub grid: GridConfig,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub output: OutputConfig,
    /// Directory that relative input paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: CommandKind,
    #[serde(default)]
    params: serde_json::Value,
    #[serde(default)]
    grid: GridConfig,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    output: OutputConfig,
}

fn located<T: DeserializeOwned>(value: serde_json::Value, prefix: &str) -> std::result::Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        ConfigError {
            path: match (prefix.is_empty(), inner.as_str()) {
                (true, p) => p.to_string(),
                (false, ".") => prefix.to_string(),
                (false, p) => format!("{prefix}.{p}"),
            },
            message: e.into_inner().to_string(),
        }
    })
}

impl RunConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> std::result::Result<Self, ConfigError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| ConfigError {
            path: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        let raw: RawConfig = located(value, "")?;
        let content = raw.params;
        let command = match raw.command {
            CommandKind::Density => Command::Density(located(content, "params")?),
            CommandKind::Gap => Command::Gap(located(content, "params")?),
            CommandKind::FrameBounds => Command::FrameBounds(located(content, "params")?),
            CommandKind::MultCheck => Command::MultCheck(located(content, "params")?),
            CommandKind::TranslateCheck => Command::TranslateCheck(located(content, "params")?),
            CommandKind::BuildGenerator => Command::BuildGenerator(located(content, "params")?),
            CommandKind::Reconstruct => Command::Reconstruct(located(content, "params")?),
            CommandKind::UnionCheck => Command::UnionCheck(located(content, "params")?),
            CommandKind::CorollaryDemo => Command::CorollaryDemo(located(content, "params")?),
        };
        let cfg = RunConfig {
            command,
            grid: raw.grid,
            tolerances: raw.tolerances,
            seed: raw.seed,
            output: raw.output,
            base_dir: base_dir.to_path_buf(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let bad = |path: &str, message: &str| ConfigError {
            path: path.into(),
            message: message.into(),
        };
        let t = &self.tolerances;
        for (name, v) in [("rank_tol", t.rank_tol), ("recon_tol", t.recon_tol), ("zero_tol", t.zero_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(&format!("tolerances.{name}"), &format!("must be positive, got {v}")));
            }
        }
        if t.max_iter == 0 {
            return Err(bad("tolerances.max_iter", "must be positive"));
        }
        if self.grid.n_per_unit == 0 {
            return Err(bad("grid.n_per_unit", "must be positive"));
        }
        validate_refine(&self.grid.refine).map_err(|m| bad("grid.refine", &m))?;
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

/// Refinement levels must be positive and strictly increasing.
pub fn validate_refine(levels: &[usize]) -> std::result::Result<(), String> {
    if levels.len() < 2 {
        return Err("needs at least two levels".into());
    }
    if levels[0] == 0 {
        return Err("levels must be positive".into());
    }
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("must be strictly increasing, got {levels:?}"));
    }
    Ok(())
}

/// Parses `"64,128,256"`.
pub fn parse_refine(s: &str) -> std::result::Result<Vec<usize>, String> {
    let levels = s
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("bad level {p:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    validate_refine(&levels)?;
    Ok(levels)
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    RunConfig::from_json(&text, &dir).map_err(|e| Error::InvalidArgument(e.to_string()))
}

impl FunctionSource {
    pub fn sample(&self, cfg: &RunConfig, grid: &std::sync::Arc<crate::domain::Grid>, label: &str) -> Result<SampledFunction> {
        match self {
            FunctionSource::Expr(src) => super::expr::parse_multiplier(src)?.sample(grid),
            FunctionSource::Csv(path) => {
                let file = std::fs::File::open(cfg.resolve(path))?;
                Ok(crate::translates::Generator::read_csv(file, grid, label)?.hat().clone())
            }
        }
    }
}
