//! Run configuration in TOML.
//!
//! Every key has a default, so an empty file (or no file) is a valid
//! configuration for every command. Each command echoes the resolved values of
//! the sections it uses; feeding the echo back through `--config` repeats the
//! run exactly.
//!
//! ```toml
//! seed = 20240101
//!
//! [simulate]
//! model = "bates"          # or "heston"
//! horizon = 2.0
//! n = 2880
//! [simulate.heston]
//! rho = 0.5
//! kappa = [5.0, 4.0]
//! [simulate.jumps]
//! lambda = 5.0
//!
//! [estimate]
//! input = "out/prices.csv"
//! kernel = "gaussian"      # gaussian | onesided | beta | uniform
//! estimator = "tkcv"       # kcv | tkcv
//! bandwidth = 0.1          # or "cv", searching cv_grid
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use spotcov_core::bandwidth;
use spotcov_core::estimators::{
    ThresholdMode, DEFAULT_THRESHOLD_BETA, DEFAULT_THRESHOLD_MULTIPLIER,
};
use spotcov_core::forecast::{Anchor, ForecastConfig, VharTarget};
use spotcov_core::mc::{EstimatorKind, Model};
use spotcov_core::simulate::{CirParams, HestonConfig, JumpConfig};
use spotcov_core::Kernel;

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 20240101;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub simulate: SimulateConfig,
    pub estimate: EstimateConfig,
    pub mc: McSection,
    pub forecast: ForecastSection,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            simulate: SimulateConfig::default(),
            estimate: EstimateConfig::default(),
            mc: McSection::default(),
            forecast: ForecastSection::default(),
        }
    }
}

impl Config {
    /// Reads `path`, or returns the defaults when there is none.
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    /// The seed and one section as TOML.
    pub fn echo<S: Serialize>(&self, name: &str, section: &S) -> CliResult<String> {
        if self.seed > i64::MAX as u64 {
            return Err(CliError::invalid(format!(
                "seed must be at most {}, got {}",
                i64::MAX,
                self.seed
            )));
        }
        let mut table = toml::Table::new();
        table.insert("seed".into(), toml::Value::Integer(self.seed as i64));
        let value = toml::Value::try_from(section)
            .map_err(|e| CliError::invalid(format!("cannot encode [{name}]: {e}")))?;
        table.insert(name.into(), value);
        toml::to_string(&table).map_err(|e| CliError::invalid(format!("cannot encode config: {e}")))
    }
}

/// Parameters of the two-asset Heston diffusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HestonSection {
    pub mu: [f64; 2],
    pub kappa: [f64; 2],
    pub theta: [f64; 2],
    pub eta: [f64; 2],
    pub v0: [f64; 2],
    pub rho: f64,
}

impl From<&HestonConfig> for HestonSection {
    fn from(c: &HestonConfig) -> Self {
        Self {
            mu: c.mu,
            kappa: [c.cir[0].kappa, c.cir[1].kappa],
            theta: [c.cir[0].theta, c.cir[1].theta],
            eta: [c.cir[0].eta, c.cir[1].eta],
            v0: [c.cir[0].v0, c.cir[1].v0],
            rho: c.rho,
        }
    }
}

impl Default for HestonSection {
    fn default() -> Self {
        (&HestonConfig::default()).into()
    }
}

impl HestonSection {
    pub fn to_core(&self, section: &str) -> CliResult<HestonConfig> {
        let cir = |k: usize| CirParams {
            kappa: self.kappa[k],
            theta: self.theta[k],
            eta: self.eta[k],
            v0: self.v0[k],
        };
        let c = HestonConfig {
            mu: self.mu,
            cir: [cir(0), cir(1)],
            rho: self.rho,
        };
        c.validate().map_err(|e| field_error(section, "heston", e))?;
        Ok(c)
    }
}

/// Compound Poisson jumps added in the Bates model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JumpSection {
    pub lambda: f64,
    pub mean: [f64; 2],
    pub sd: [f64; 2],
}

impl Default for JumpSection {
    fn default() -> Self {
        let j = JumpConfig::default();
        Self {
            lambda: j.lambda,
            mean: j.jump_mean,
            sd: j.jump_sd,
        }
    }
}

impl JumpSection {
    pub fn to_core(&self, section: &str) -> CliResult<JumpConfig> {
        let j = JumpConfig {
            lambda: self.lambda,
            jump_mean: self.mean,
            jump_sd: self.sd,
        };
        j.validate().map_err(|e| field_error(section, "jumps", e))?;
        Ok(j)
    }
}

fn field_error(section: &str, field: &str, e: spotcov_core::Error) -> CliError {
    CliError::invalid(format!("[{section}.{field}] {e}"))
}

fn invalid_field(section: &str, field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::invalid(format!("[{section}] {field}: {msg}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub model: Model,
    pub horizon: f64,
    /// Number of increments.
    pub n: usize,
    pub heston: HestonSection,
    pub jumps: JumpSection,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            model: Model::Heston,
            horizon: 2.0,
            n: 2880,
            heston: HestonSection::default(),
            jumps: JumpSection::default(),
        }
    }
}

impl SimulateConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(invalid_field("simulate", "horizon", "must be positive"));
        }
        if self.n == 0 {
            return Err(invalid_field("simulate", "n", "must be at least 1"));
        }
        self.heston.to_core("simulate")?;
        if self.model == Model::Bates {
            self.jumps.to_core("simulate")?;
        }
        Ok(())
    }
}

/// A fixed bandwidth or `"cv"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandwidthSetting {
    Fixed(f64),
    Named(String),
}

impl BandwidthSetting {
    /// `Some(h)` for a fixed bandwidth, `None` for cross-validation.
    pub fn resolve(&self, section: &str) -> CliResult<Option<f64>> {
        match self {
            BandwidthSetting::Fixed(h) if *h > 0.0 && h.is_finite() => Ok(Some(*h)),
            BandwidthSetting::Fixed(h) => {
                Err(invalid_field(section, "bandwidth", format!("must be positive, got {h}")))
            }
            BandwidthSetting::Named(s) if s == "cv" => Ok(None),
            BandwidthSetting::Named(s) => Err(invalid_field(
                section,
                "bandwidth",
                format!("expected a number or \"cv\", got {s:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdKind {
    /// `c = multiplier · m · δ^{−β}` with `m` the median of `‖ΔX‖²/d`.
    Calibrated,
    /// `c` as given.
    Fixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSection {
    pub kind: ThresholdKind,
    pub multiplier: f64,
    pub c: f64,
    pub beta: f64,
    /// Mode of a fixed threshold; calibrated thresholds are squared-norm.
    pub mode: ThresholdMode,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        Self {
            kind: ThresholdKind::Calibrated,
            multiplier: DEFAULT_THRESHOLD_MULTIPLIER,
            c: 1.0,
            beta: DEFAULT_THRESHOLD_BETA,
            mode: ThresholdMode::SquaredNorm,
        }
    }
}

impl ThresholdSection {
    pub fn validate(&self, section: &str) -> CliResult<()> {
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(invalid_field(section, "threshold.beta", "must lie in (0, 1)"));
        }
        match self.kind {
            ThresholdKind::Calibrated if !(self.multiplier > 0.0 && self.multiplier.is_finite()) => {
                Err(invalid_field(section, "threshold.multiplier", "must be positive"))
            }
            ThresholdKind::Fixed if !(self.c > 0.0 && self.c.is_finite()) => {
                Err(invalid_field(section, "threshold.c", "must be positive"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimateConfig {
    /// Log-price CSV: `time,asset_1,...,asset_d` on a uniform time grid.
    pub input: PathBuf,
    pub kernel: Kernel,
    pub estimator: EstimatorKind,
    pub bandwidth: BandwidthSetting,
    /// Candidates searched when `bandwidth = "cv"`.
    pub cv_grid: Vec<f64>,
    /// `[t_l, t_u]` in the time units of the input. Defaults to the sample
    /// span with 10% trimmed at each end.
    pub window: Option<[f64; 2]>,
    /// Evenly spaced estimation times across the window, endpoints included.
    pub eval_points: usize,
    pub threshold: ThresholdSection,
    /// Also write pointwise confidence bands.
    pub bands: bool,
    pub band_level: f64,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::from("prices.csv"),
            kernel: Kernel::Gaussian,
            estimator: EstimatorKind::Kcv,
            bandwidth: BandwidthSetting::Fixed(0.1),
            cv_grid: vec![0.01, 0.02, 0.05, 0.1, 0.2],
            window: None,
            eval_points: 101,
            threshold: ThresholdSection::default(),
            bands: false,
            band_level: 0.95,
        }
    }
}

impl EstimateConfig {
    pub fn validate(&self) -> CliResult<()> {
        self.bandwidth.resolve("estimate")?;
        if self.eval_points < 2 {
            return Err(invalid_field("estimate", "eval_points", "must be at least 2"));
        }
        if self.cv_grid.is_empty() || self.cv_grid.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(invalid_field("estimate", "cv_grid", "must be nonempty and positive"));
        }
        if !(self.band_level > 0.0 && self.band_level < 1.0) {
            return Err(invalid_field("estimate", "band_level", "must lie in (0, 1)"));
        }
        self.threshold.validate("estimate")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSection {
    pub model: Model,
    pub horizon: f64,
    pub reps: usize,
    /// Increments per path, one entry per sampling frequency.
    pub frequencies: Vec<usize>,
    pub kernels: Vec<Kernel>,
    pub estimator: EstimatorKind,
    pub bandwidth: BandwidthSetting,
    pub cv_grid: Vec<f64>,
    /// Integration window; defaults to `[0.1 T, 0.9 T]`.
    pub window: Option<[f64; 2]>,
    pub eval_points: usize,
    /// Studied element as one-based `[row, column]`.
    pub element: [usize; 2],
    /// Time of the standardized errors; defaults to `T / 2`.
    pub qq_time: Option<f64>,
    pub band_level: f64,
    pub threshold: ThresholdSection,
    pub heston: HestonSection,
    pub jumps: JumpSection,
}

impl Default for McSection {
    fn default() -> Self {
        let c = spotcov_core::mc::McConfig::default();
        Self {
            model: c.model,
            horizon: c.horizon,
            reps: c.reps,
            frequencies: c.frequencies,
            kernels: c.kernels,
            estimator: c.estimator,
            bandwidth: BandwidthSetting::Fixed(0.05),
            cv_grid: vec![0.01, 0.02, 0.05, 0.1, 0.2],
            window: None,
            eval_points: c.eval_points,
            element: [c.element.0 + 1, c.element.1 + 1],
            qq_time: None,
            band_level: c.band_level,
            threshold: ThresholdSection::default(),
            heston: (&c.heston).into(),
            jumps: JumpSection::default(),
        }
    }
}

impl McSection {
    /// Fills the horizon-dependent defaults.
    pub fn resolved(&self) -> Self {
        let mut s = self.clone();
        if s.window.is_none() {
            let (lo, hi) = bandwidth::default_window(s.horizon);
            s.window = Some([lo, hi]);
        }
        if s.qq_time.is_none() {
            s.qq_time = Some(0.5 * s.horizon);
        }
        s
    }

    pub fn to_core(&self, seed: u64) -> CliResult<spotcov_core::mc::McConfig> {
        use spotcov_core::estimators::ThresholdSpec;
        use spotcov_core::mc::{BandwidthChoice, McConfig, ThresholdChoice};
        let s = self.resolved();
        self.threshold.validate("mc")?;
        if s.element[0] == 0 || s.element[1] == 0 {
            return Err(invalid_field("mc", "element", "indices are one-based"));
        }
        let bandwidth = match s.bandwidth.resolve("mc")? {
            Some(h) => BandwidthChoice::Fixed(h),
            None => BandwidthChoice::Cv(s.cv_grid.clone()),
        };
        let threshold = match s.threshold.kind {
            ThresholdKind::Calibrated => ThresholdChoice::Calibrated {
                multiplier: s.threshold.multiplier,
                beta: s.threshold.beta,
            },
            ThresholdKind::Fixed => ThresholdChoice::Fixed(
                ThresholdSpec::new(s.threshold.c, s.threshold.beta, s.threshold.mode)
                    .map_err(|e| field_error("mc", "threshold", e))?,
            ),
        };
        let window = s.window.expect("resolved");
        let cfg = McConfig {
            model: s.model,
            heston: s.heston.to_core("mc")?,
            jumps: if s.model == Model::Bates {
                s.jumps.to_core("mc")?
            } else {
                JumpConfig::none()
            },
            horizon: s.horizon,
            reps: s.reps,
            frequencies: s.frequencies.clone(),
            kernels: s.kernels.clone(),
            estimator: s.estimator,
            threshold,
            window: (window[0], window[1]),
            eval_points: s.eval_points,
            bandwidth,
            element: (s.element[0] - 1, s.element[1] - 1),
            qq_time: s.qq_time.expect("resolved"),
            band_level: s.band_level,
            master_seed: seed,
        };
        cfg.validate().map_err(|e| CliError::invalid(format!("[mc] {e}")))?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForecastSection {
    pub model: Model,
    pub days: usize,
    pub steps_per_day: usize,
    pub kernel: Kernel,
    /// Bandwidth in days.
    pub h: f64,
    pub anchor: Anchor,
    pub train_fraction: f64,
    pub horizons: Vec<usize>,
    pub target: VharTarget,
    pub heston: HestonSection,
    pub jumps: JumpSection,
}

impl Default for ForecastSection {
    fn default() -> Self {
        let c = ForecastConfig::default();
        Self {
            model: Model::Heston,
            days: c.days,
            steps_per_day: c.steps_per_day,
            kernel: c.kernel,
            h: c.h,
            anchor: c.anchor,
            train_fraction: c.train_fraction,
            horizons: c.horizons,
            target: c.target,
            heston: (&c.heston).into(),
            jumps: JumpSection::default(),
        }
    }
}

impl ForecastSection {
    pub fn to_core(&self, seed: u64) -> CliResult<ForecastConfig> {
        let cfg = ForecastConfig {
            heston: self.heston.to_core("forecast")?,
            jumps: match self.model {
                Model::Bates => Some(self.jumps.to_core("forecast")?),
                Model::Heston => None,
            },
            days: self.days,
            steps_per_day: self.steps_per_day,
            kernel: self.kernel,
            h: self.h,
            anchor: self.anchor,
            train_fraction: self.train_fraction,
            horizons: self.horizons.clone(),
            target: self.target,
            seed,
        };
        cfg.validate().map_err(|e| CliError::invalid(format!("[forecast] {e}")))?;
        Ok(cfg)
    }
}
