//! CSV files read and written by the commands.
//!
//! Every file has a header row. Floats are written in the shortest form that
//! parses back to the same value.

use std::fs::File;
use std::path::Path;

use spotcov_core::forecast::{FactorSeries, LossReport, VharModel};
use spotcov_core::mc::{McReport, QqData};
use spotcov_core::simulate::JumpEvent;
use spotcov_core::timeseries::{vech, vech_labels};
use spotcov_core::{CovPath, PricePath, TimeGrid};

use crate::error::{CliError, CliResult};

/// Relative tolerance, in steps, on the spacing of input timestamps.
pub const GRID_TOL: f64 = 1e-6;

pub fn fmt(x: f64) -> String {
    format!("{x:?}")
}

/// A price path read from disk with the time of its first row.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedPrices {
    pub start: f64,
    pub path: PricePath,
}

struct Table {
    path: std::path::PathBuf,
    writer: csv::Writer<File>,
}

impl Table {
    fn create(path: &Path, header: &[String]) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut t = Self {
            path: path.to_path_buf(),
            writer: csv::Writer::from_writer(file),
        };
        t.row(header)?;
        Ok(t)
    }

    fn row(&mut self, fields: &[String]) -> CliResult<()> {
        self.writer.write_record(fields).map_err(|e| CliError::io(&self.path, e))
    }

    fn finish(mut self) -> CliResult<()> {
        self.writer.flush().map_err(|e| CliError::io(&self.path, e))
    }
}

fn vech_header(first: &str, d: usize) -> Vec<String> {
    let mut h = vec![first.to_string()];
    h.extend(vech_labels(d).into_iter().map(|(k, l)| format!("s_{k}_{l}")));
    h
}

pub fn write_prices(path: &Path, prices: &TimedPrices) -> CliResult<()> {
    let p = &prices.path;
    let mut header = vec!["time".to_string()];
    header.extend((1..=p.dim()).map(|k| format!("asset_{k}")));
    let mut t = Table::create(path, &header)?;
    for i in 0..=p.grid().n() {
        let mut row = vec![fmt(prices.start + p.grid().point(i))];
        row.extend(p.row(i).iter().map(|&x| fmt(x)));
        t.row(&row)?;
    }
    t.finish()
}

fn parse_field(path: &Path, line: u64, column: usize, s: &str) -> CliResult<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
        CliError::invalid(format!(
            "{}: line {line}, column {}: not a finite number: {s:?}",
            path.display(),
            column + 1
        ))
    })
}

/// Reads `time,asset_1,...,asset_d`. Timestamps must be increasing and evenly
/// spaced.
pub fn read_prices(path: &Path) -> CliResult<TimedPrices> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?
        .clone();
    let d = header.len().checked_sub(1).filter(|&d| d > 0).ok_or_else(|| {
        CliError::invalid(format!("{}: line 1: need a time column and at least one asset", path.display()))
    })?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    let mut lines = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            CliError::invalid(format!("{}: line {line}: {e}", path.display()))
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != d + 1 {
            return Err(CliError::invalid(format!(
                "{}: line {line}: expected {} fields, found {}",
                path.display(),
                d + 1,
                rec.len()
            )));
        }
        times.push(parse_field(path, line, 0, &rec[0])?);
        for (j, s) in rec.iter().enumerate().skip(1) {
            values.push(parse_field(path, line, j, s)?);
        }
        lines.push(line);
    }
    if times.len() < 2 {
        return Err(CliError::invalid(format!("{}: need at least two rows", path.display())));
    }
    let n = times.len() - 1;
    let start = times[0];
    let span = times[n] - start;
    if !(span > 0.0) {
        return Err(CliError::invalid(format!(
            "{}: line {}: timestamps must increase",
            path.display(),
            lines[n]
        )));
    }
    let delta = span / n as f64;
    for (i, &t) in times.iter().enumerate() {
        if (t - (start + i as f64 * delta)).abs() > GRID_TOL * delta {
            return Err(CliError::invalid(format!(
                "{}: line {}: non-uniform timestamps (expected {}, found {t})",
                path.display(),
                lines[i],
                start + i as f64 * delta
            )));
        }
    }
    let grid = TimeGrid::new(span, n)?;
    Ok(TimedPrices {
        start,
        path: PricePath::new(grid, d, values)?,
    })
}

/// `time,s_1_1,s_2_1,...` with times shifted by `start`.
pub fn write_cov_path(path: &Path, cov: &CovPath, start: f64) -> CliResult<()> {
    let d = cov.dim().unwrap_or(0);
    let mut t = Table::create(path, &vech_header("time", d))?;
    for (time, m) in cov.times().iter().zip(cov.series()) {
        let mut row = vec![fmt(start + time)];
        row.extend(vech(m).into_iter().map(fmt));
        t.row(&row)?;
    }
    t.finish()
}

/// Pointwise bands: `time`, then `lower_k_l,upper_k_l` per element.
pub fn write_bands(path: &Path, d: usize, rows: &[(f64, Vec<(f64, f64)>)]) -> CliResult<()> {
    let mut header = vec!["time".to_string()];
    for (k, l) in vech_labels(d) {
        header.push(format!("lower_{k}_{l}"));
        header.push(format!("upper_{k}_{l}"));
    }
    let mut t = Table::create(path, &header)?;
    for (time, pairs) in rows {
        let mut row = vec![fmt(*time)];
        for &(lo, hi) in pairs {
            row.push(fmt(lo));
            row.push(fmt(hi));
        }
        t.row(&row)?;
    }
    t.finish()
}

pub fn write_jumps(path: &Path, jumps: &[JumpEvent], start: f64) -> CliResult<()> {
    let header = ["time", "step", "jump_1", "jump_2"].map(String::from);
    let mut t = Table::create(path, &header)?;
    for j in jumps {
        t.row(&[
            fmt(start + j.time),
            j.step.to_string(),
            fmt(j.sizes[0]),
            fmt(j.sizes[1]),
        ])?;
    }
    t.finish()
}

pub fn write_cv(path: &Path, candidates: &[f64], values: &[f64]) -> CliResult<()> {
    let mut t = Table::create(path, &["h", "cv_value"].map(String::from))?;
    for (h, v) in candidates.iter().zip(values) {
        t.row(&[fmt(*h), fmt(*v)])?;
    }
    t.finish()
}

pub fn write_mc_table(path: &Path, report: &McReport) -> CliResult<()> {
    let header = [
        "kernel", "n", "delta", "h", "imse", "isb", "reps", "reps_failed", "coverage",
    ]
    .map(String::from);
    let mut t = Table::create(path, &header)?;
    for c in &report.cells {
        t.row(&[
            c.kernel.name().to_string(),
            c.n.to_string(),
            fmt(c.delta),
            fmt(c.bandwidth),
            fmt(c.imse),
            fmt(c.isb),
            c.reps_ok.to_string(),
            c.reps_failed.to_string(),
            fmt(c.band_coverage),
        ])?;
    }
    t.finish()
}

pub fn write_qq(path: &Path, qq: &QqData) -> CliResult<()> {
    let mut t = Table::create(path, &["theoretical", "empirical"].map(String::from))?;
    for (a, b) in qq.theoretical.iter().zip(&qq.empirical) {
        t.row(&[fmt(*a), fmt(*b)])?;
    }
    t.finish()
}

pub fn write_losses(path: &Path, report: &LossReport) -> CliResult<()> {
    let header = ["model", "horizon", "loss_name", "value"].map(String::from);
    let mut t = Table::create(path, &header)?;
    for e in &report.entries {
        t.row(&[
            e.model.name().to_string(),
            e.horizon.to_string(),
            e.loss.name().to_string(),
            fmt(e.value),
        ])?;
    }
    t.finish()
}

/// `date,f_1,...,f_m,jitter`; dates count days from 1.
pub fn write_factors(path: &Path, series: &FactorSeries) -> CliResult<()> {
    let mut header = vec!["date".to_string()];
    header.extend((1..=series.width()).map(|j| format!("f_{j}")));
    header.push("jitter".into());
    let mut t = Table::create(path, &header)?;
    for (day, (f, jit)) in series.factors.iter().zip(&series.jitter).enumerate() {
        let mut row = vec![(day + 1).to_string()];
        row.extend(f.iter().map(|&x| fmt(x)));
        row.push(fmt(*jit));
        t.row(&row)?;
    }
    t.finish()
}

/// One row per model and horizon. Multi-step forecasts iterate the one-step
/// fit, so the coefficients repeat across horizons.
pub fn write_coefficients(
    path: &Path,
    models: &[(&str, &VharModel)],
    horizons: &[usize],
) -> CliResult<()> {
    let width = models.first().map(|m| m.1.alpha.len()).unwrap_or(0);
    let mut header = vec!["model".to_string(), "horizon".to_string()];
    header.extend((1..=width).map(|j| format!("alpha_{j}")));
    header.extend(
        ["beta_d", "beta_w", "beta_m", "residual_sd", "condition", "observations"]
            .map(String::from),
    );
    let mut t = Table::create(path, &header)?;
    for (name, m) in models {
        for h in horizons {
            let mut row = vec![name.to_string(), h.to_string()];
            row.extend(m.alpha.iter().map(|&a| fmt(a)));
            row.extend([m.beta_d, m.beta_w, m.beta_m, m.residual_sd, m.condition].map(fmt));
            row.push(m.observations.to_string());
            t.row(&row)?;
        }
    }
    t.finish()
}
