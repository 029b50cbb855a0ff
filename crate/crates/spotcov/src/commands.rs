//! The subcommands. Each one echoes its resolved configuration to `echo` and
//! to `resolved_config.toml` in the output directory before computing.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use spotcov_core::bandwidth::{cv_bandwidth, BandwidthGrid, CvCurve};
use spotcov_core::estimators::{self, asymptotic_band, omega, ThresholdSpec};
use spotcov_core::exec::Executor;
use spotcov_core::forecast::compare_models;
use spotcov_core::mc::{qq_data, run_mc_study, EstimatorKind, Model, QQ_MIN_SAMPLES};
use spotcov_core::simulate::{simulate_bates2d, simulate_heston2d};
use spotcov_core::timeseries::{log_returns, vech_labels};
use spotcov_core::{CovPath, IncrementSeries, KernelSpec, TimeGrid};

use crate::config::{Config, EstimateConfig, ThresholdKind};
use crate::error::{CliError, CliResult};
use crate::io::{self, TimedPrices};

pub const RESOLVED_CONFIG: &str = "resolved_config.toml";

/// Files written by a command, in the order they were written.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    pub files: Vec<PathBuf>,
}

impl Outputs {
    fn add(&mut self, p: PathBuf) -> &Path {
        self.files.push(p);
        self.files.last().expect("just pushed")
    }
}

fn prepare(out: &Path) -> CliResult<()> {
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))
}

fn emit<S: Serialize>(
    cfg: &Config,
    name: &str,
    section: &S,
    out: &Path,
    echo: &mut dyn Write,
    outputs: &mut Outputs,
) -> CliResult<()> {
    let text = cfg.echo(name, section)?;
    echo.write_all(text.as_bytes())
        .and_then(|_| echo.flush())
        .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
    let p = outputs.add(out.join(RESOLVED_CONFIG));
    std::fs::write(p, text).map_err(|e| CliError::io(p, e))
}

pub fn simulate(cfg: &Config, out: &Path, echo: &mut dyn Write) -> CliResult<Outputs> {
    let s = &cfg.simulate;
    s.validate()?;
    prepare(out)?;
    let mut outputs = Outputs::default();
    emit(cfg, "simulate", s, out, echo, &mut outputs)?;

    let grid = TimeGrid::new(s.horizon, s.n)?;
    let heston = s.heston.to_core("simulate")?;
    let sim = match s.model {
        Model::Heston => simulate_heston2d(&heston, &grid, cfg.seed)?,
        Model::Bates => simulate_bates2d(&heston, &s.jumps.to_core("simulate")?, &grid, cfg.seed)?,
    };
    let prices = TimedPrices {
        start: 0.0,
        path: sim.prices,
    };
    io::write_prices(outputs.add(out.join("prices.csv")), &prices)?;
    io::write_cov_path(outputs.add(out.join("true_cov.csv")), &sim.true_cov, 0.0)?;
    io::write_jumps(outputs.add(out.join("jumps.csv")), &sim.jumps, 0.0)?;
    Ok(outputs)
}

/// Input and increments of an estimation run. `window` is in the time units
/// of the input file; estimation times are formed there and then shifted, so
/// a rerun from the echoed window reproduces them exactly.
struct EstimationInput {
    prices: TimedPrices,
    increments: IncrementSeries,
    spec: KernelSpec,
    window: [f64; 2],
    section: EstimateConfig,
}

impl EstimationInput {
    fn relative(&self, t: f64) -> f64 {
        t - self.prices.start
    }

    fn relative_window(&self) -> (f64, f64) {
        (self.relative(self.window[0]), self.relative(self.window[1]))
    }
}

fn load_estimation(cfg: &Config) -> CliResult<EstimationInput> {
    let e = &cfg.estimate;
    e.validate()?;
    let prices = io::read_prices(&e.input)?;
    let horizon = prices.path.grid().horizon();
    let window = match e.window {
        Some(w) => w,
        None => {
            let (lo, hi) = spotcov_core::bandwidth::default_window(horizon);
            [prices.start + lo, prices.start + hi]
        }
    };
    let (lo, hi) = (window[0] - prices.start, window[1] - prices.start);
    if !(0.0 < lo && lo < hi && hi < horizon) {
        return Err(CliError::invalid(format!(
            "[estimate] window: must lie strictly inside the sample ({}, {})",
            prices.start,
            prices.start + horizon
        )));
    }
    let mut section = e.clone();
    section.window = Some(window);
    Ok(EstimationInput {
        spec: KernelSpec::new(e.kernel)?,
        increments: log_returns(&prices.path),
        prices,
        window,
        section,
    })
}

fn run_cv<E: Executor>(input: &EstimationInput, exec: &E) -> CliResult<CvCurve> {
    let horizon = input.prices.path.grid().horizon();
    let mut candidates = input.section.cv_grid.clone();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let grid = BandwidthGrid::new(candidates, input.relative_window(), horizon)?;
    Ok(cv_bandwidth(&input.increments, &input.spec, &grid, exec)?)
}

pub fn select_bandwidth<E: Executor>(
    cfg: &Config,
    out: &Path,
    exec: &E,
    echo: &mut dyn Write,
) -> CliResult<(Outputs, f64)> {
    let input = load_estimation(cfg)?;
    prepare(out)?;
    let mut outputs = Outputs::default();
    emit(cfg, "estimate", &input.section, out, echo, &mut outputs)?;
    let curve = run_cv(&input, exec)?;
    io::write_cv(outputs.add(out.join("cv.csv")), &curve.candidates, &curve.values)?;
    Ok((outputs, curve.chosen))
}

pub fn estimate<E: Executor>(
    cfg: &Config,
    out: &Path,
    exec: &E,
    echo: &mut dyn Write,
) -> CliResult<Outputs> {
    let input = load_estimation(cfg)?;
    prepare(out)?;
    let mut outputs = Outputs::default();
    let s = &input.section;
    emit(cfg, "estimate", s, out, echo, &mut outputs)?;

    let h = match s.bandwidth.resolve("estimate")? {
        Some(h) => h,
        None => {
            let curve = run_cv(&input, exec)?;
            io::write_cv(outputs.add(out.join("cv.csv")), &curve.candidates, &curve.values)?;
            curve.chosen
        }
    };
    let thr = match (s.estimator, s.threshold.kind) {
        (EstimatorKind::Kcv, _) => None,
        (EstimatorKind::Tkcv, ThresholdKind::Calibrated) => Some(ThresholdSpec::calibrated(
            &input.increments,
            s.threshold.multiplier,
            s.threshold.beta,
        )?),
        (EstimatorKind::Tkcv, ThresholdKind::Fixed) => Some(ThresholdSpec::new(
            s.threshold.c,
            s.threshold.beta,
            s.threshold.mode,
        )?),
    };

    let [lo, hi] = input.window;
    let m = s.eval_points;
    let times: Vec<f64> = (0..m)
        .map(|j| if j + 1 == m { hi } else { lo + (hi - lo) * j as f64 / (m - 1) as f64 })
        .collect();
    let taus: Vec<f64> = times.iter().map(|&t| input.relative(t)).collect();
    let inc = &input.increments;
    let spec = &input.spec;
    let estimates = exec.map(taus.len(), |j| match &thr {
        None => estimators::kcv(inc, spec, h, taus[j]),
        Some(t) => estimators::tkcv(inc, spec, h, taus[j], t),
    });
    let estimates = estimates.into_iter().collect::<Result<Vec<_>, _>>()?;
    let path = CovPath::new(times.clone(), estimates)?;
    io::write_cov_path(outputs.add(out.join("spot_cov.csv")), &path, 0.0)?;

    if s.bands {
        let d = inc.dim();
        let delta = inc.grid().delta();
        let mut rows = Vec::with_capacity(taus.len());
        for (&time, est) in times.iter().zip(path.series()) {
            let band = asymptotic_band(est, &omega(est), delta, h, spec, s.band_level)?;
            let pairs = vech_labels(d)
                .into_iter()
                .map(|(k, l)| band.interval(k - 1, l - 1))
                .collect();
            rows.push((time, pairs));
        }
        io::write_bands(outputs.add(out.join("bands.csv")), d, &rows)?;
    }
    Ok(outputs)
}

pub fn mc_study<E: Executor>(
    cfg: &Config,
    out: &Path,
    exec: &E,
    echo: &mut dyn Write,
) -> CliResult<Outputs> {
    let section = cfg.mc.resolved();
    let core = section.to_core(cfg.seed)?;
    prepare(out)?;
    let mut outputs = Outputs::default();
    emit(cfg, "mc", &section, out, echo, &mut outputs)?;

    let report = run_mc_study(&core, exec)?;
    io::write_mc_table(outputs.add(out.join("mc_table.csv")), &report)?;
    for c in &report.cells {
        if c.z_scores.len() < QQ_MIN_SAMPLES {
            continue;
        }
        let qq = qq_data(&c.z_scores)?;
        let name = format!("qq_{}_{}.csv", c.kernel.name(), c.n);
        io::write_qq(outputs.add(out.join(name)), &qq)?;
    }
    Ok(outputs)
}

pub fn forecast(cfg: &Config, out: &Path, echo: &mut dyn Write) -> CliResult<Outputs> {
    let section = &cfg.forecast;
    let core = section.to_core(cfg.seed)?;
    prepare(out)?;
    let mut outputs = Outputs::default();
    emit(cfg, "forecast", section, out, echo, &mut outputs)?;

    let cmp = compare_models(&core)?;
    io::write_losses(outputs.add(out.join("losses.csv")), &cmp.report)?;
    io::write_coefficients(
        outputs.add(out.join("coefficients.csv")),
        &[("vhar-rc", &cmp.rc_model), ("vhar-kcv", &cmp.kcv_model)],
        &core.horizons,
    )?;
    io::write_factors(outputs.add(out.join("factors_rc.csv")), &cmp.rc_series)?;
    io::write_factors(outputs.add(out.join("factors_kcv.csv")), &cmp.kcv_series)?;
    Ok(outputs)
}
