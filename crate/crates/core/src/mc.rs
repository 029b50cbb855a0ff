//! Monte Carlo evaluation of the spot covariance estimators.
//!
//! A study simulates one volatility trajectory (and, for the Bates model, one
//! jump trajectory) from the master seed and keeps it fixed. Every
//! replication draws a fresh diffusive price path on the finest grid, which
//! is then subsampled to each requested frequency. Estimates are compared
//! with the true covariance at evaluation times placed on nodes of the finest
//! grid inside the window.
//!
//! Replication `r` uses seed [`replication_seed`]`(master, r)`, and results are
//! reduced in replication order, so a report does not depend on the executor.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::bandwidth::{self, check_window, BandwidthGrid, ElementSelection};
use crate::error::{invalid_arg, invalid_state, Result};
use crate::estimators::{self, asymptotic_band, omega, standardized_errors, ThresholdSpec};
use crate::exec::Executor;
use crate::kernels::{Kernel, KernelSpec};
use crate::math::{floor, normal_cdf, normal_quantile, sqrt, CompensatedSum};
use crate::rng::{self, derive_seed, replication_seed};
use crate::simulate::{
    self, assemble_prices, diffusion_increments, HestonConfig, JumpConfig, JumpPath,
};
use crate::timeseries::{CovPath, IncrementSeries, TimeGrid};

/// Seed label of the replication used for cross-validated bandwidths.
pub const PILOT: &str = "pilot";

/// Share of failed replications above which a study is aborted.
pub const MAX_FAILURE_RATE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Model {
    Heston,
    Bates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum EstimatorKind {
    Kcv,
    Tkcv,
}

/// How the TKCV threshold is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdChoice {
    /// [`ThresholdSpec::calibrated`] on each replication's increments.
    Calibrated { multiplier: f64, beta: f64 },
    Fixed(ThresholdSpec),
}

impl Default for ThresholdChoice {
    fn default() -> Self {
        ThresholdChoice::Calibrated {
            multiplier: estimators::DEFAULT_THRESHOLD_MULTIPLIER,
            beta: estimators::DEFAULT_THRESHOLD_BETA,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BandwidthChoice {
    Fixed(f64),
    /// Cross-validation over the candidates on a pilot replication, once per
    /// kernel and frequency.
    Cv(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub model: Model,
    pub heston: HestonConfig,
    pub jumps: JumpConfig,
    pub horizon: f64,
    pub reps: usize,
    /// Number of increments per path for each sampling frequency.
    pub frequencies: Vec<usize>,
    pub kernels: Vec<Kernel>,
    pub estimator: EstimatorKind,
    pub threshold: ThresholdChoice,
    pub window: (f64, f64),
    pub eval_points: usize,
    pub bandwidth: BandwidthChoice,
    /// Element under study, zero-based.
    pub element: (usize, usize),
    /// Time of the standardized errors and band coverage.
    pub qq_time: f64,
    pub band_level: f64,
    pub master_seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        let horizon = 2.0;
        Self {
            model: Model::Heston,
            heston: HestonConfig::default(),
            jumps: JumpConfig::default(),
            horizon,
            reps: 500,
            frequencies: vec![576, 2880, 34560],
            kernels: vec![Kernel::Gaussian, Kernel::OneSidedExp, Kernel::Beta],
            estimator: EstimatorKind::Kcv,
            threshold: ThresholdChoice::default(),
            window: bandwidth::default_window(horizon),
            eval_points: 101,
            bandwidth: BandwidthChoice::Fixed(0.05),
            element: (1, 0),
            qq_time: 0.5 * horizon,
            band_level: 0.95,
            master_seed: 20240101,
        }
    }
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        self.heston.validate()?;
        if self.model == Model::Bates {
            self.jumps.validate()?;
        }
        if !(self.horizon > 0.0) || !self.horizon.is_finite() {
            return Err(invalid_arg!("horizon must be positive, got {}", self.horizon));
        }
        if self.reps < 2 {
            return Err(invalid_arg!("need at least 2 replications, got {}", self.reps));
        }
        if self.frequencies.is_empty() || self.frequencies.iter().any(|&n| n < 2) {
            return Err(invalid_arg!("frequencies must be nonempty with n >= 2"));
        }
        if self.kernels.is_empty() {
            return Err(invalid_arg!("at least one kernel is required"));
        }
        check_window(self.window, self.horizon)?;
        if self.eval_points < 2 {
            return Err(invalid_arg!("need at least 2 evaluation points"));
        }
        if self.element.0 > 1 || self.element.1 > 1 {
            return Err(invalid_arg!("element {:?} outside a 2x2 matrix", self.element));
        }
        if !(self.qq_time > 0.0 && self.qq_time < self.horizon) {
            return Err(invalid_arg!("qq time {} must lie inside (0, T)", self.qq_time));
        }
        if !(self.band_level > 0.0 && self.band_level < 1.0) {
            return Err(invalid_arg!("band level must lie in (0, 1)"));
        }
        match &self.bandwidth {
            BandwidthChoice::Fixed(h) if !(*h > 0.0) || !h.is_finite() => {
                return Err(invalid_arg!("bandwidth must be positive, got {h}"))
            }
            BandwidthChoice::Cv(c) => {
                BandwidthGrid::new(c.clone(), self.window, self.horizon)?;
            }
            _ => {}
        }
        if let ThresholdChoice::Calibrated { multiplier, beta } = self.threshold {
            if !(multiplier > 0.0) || !(beta > 0.0 && beta < 1.0) {
                return Err(invalid_arg!(
                    "threshold multiplier must be > 0 and beta in (0, 1)"
                ));
            }
        }
        Ok(())
    }
}

/// Results for one kernel at one sampling frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct McCell {
    pub kernel: Kernel,
    pub n: usize,
    pub delta: f64,
    pub bandwidth: f64,
    pub imse: f64,
    pub isb: f64,
    pub reps_ok: usize,
    pub reps_failed: usize,
    /// Integrated squared error of each successful replication.
    pub ise_samples: Vec<f64>,
    /// Standardized errors of the studied element at the QQ time.
    pub z_scores: Vec<f64>,
    /// Share of replications whose asymptotic band covers the truth at the
    /// QQ time.
    pub band_coverage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub cells: Vec<McCell>,
    /// Evaluation times (nodes of the finest grid).
    pub eval_times: Vec<f64>,
    /// Integration window after snapping to grid nodes.
    pub window: (f64, f64),
    /// QQ time after snapping.
    pub qq_time: f64,
    pub truth: CovPath,
}

impl McReport {
    pub fn cell(&self, kernel: Kernel, n: usize) -> Option<&McCell> {
        self.cells.iter().find(|c| c.kernel == kernel && c.n == n)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm_all(ns: &[usize]) -> Result<usize> {
    let mut acc = 1usize;
    for &n in ns {
        acc = (acc / gcd(acc, n))
            .checked_mul(n)
            .filter(|v| *v <= 50_000_000)
            .ok_or_else(|| invalid_arg!("frequencies {ns:?} need too fine a common grid"))?;
    }
    Ok(acc)
}

fn snap(grid: &TimeGrid, t: f64) -> usize {
    let i = floor(t / grid.delta() + 0.5) as usize;
    i.min(grid.n())
}

/// Per-replication output of one cell.
struct RepCell {
    ise: f64,
    errors: Vec<f64>,
    z: f64,
    covered: bool,
}

struct Setup {
    spec: KernelSpec,
    n: usize,
    factor: usize,
    h: f64,
}

/// Runs the study described by `cfg`.
pub fn run_mc_study<E: Executor>(cfg: &McConfig, exec: &E) -> Result<McReport> {
    cfg.validate()?;
    let n_base = lcm_all(&cfg.frequencies)?;
    let base = TimeGrid::new(cfg.horizon, n_base)?;

    let i0 = snap(&base, cfg.window.0);
    let i1 = snap(&base, cfg.window.1);
    if !(0 < i0 && i0 < i1 && i1 < n_base) {
        return Err(invalid_arg!("window collapses on the simulation grid"));
    }
    let mut idx: Vec<usize> = (0..cfg.eval_points)
        .map(|j| {
            let f = j as f64 / (cfg.eval_points - 1) as f64;
            i0 + floor(f * (i1 - i0) as f64 + 0.5) as usize
        })
        .collect();
    idx.dedup();
    let eval_times: Vec<f64> = idx.iter().map(|&i| base.point(i)).collect();
    let window = (base.point(i0), base.point(i1));
    let iq = snap(&base, cfg.qq_time);
    let qq_time = base.point(iq);

    let vols = simulate::simulate_volatility(&cfg.heston, &base, cfg.master_seed)?;
    let truth_full = simulate::true_covariance(&cfg.heston, &base, &vols)?;
    let truth = CovPath::new(
        eval_times.clone(),
        idx.iter().map(|&i| truth_full.series()[i].clone()).collect(),
    )?;
    let truth_q = truth_full.series()[iq].clone();
    let omega_q = omega(&truth_q);
    let jumps: Option<JumpPath> = match cfg.model {
        Model::Heston => None,
        Model::Bates => Some(simulate::simulate_compound_poisson(
            &cfg.jumps,
            &base,
            cfg.master_seed,
        )?),
    };
    let (ek, el) = cfg.element;
    let truth_elem: Vec<f64> = truth.element(ek, el);

    let simulate_increments = |seed: u64, factor: usize| -> Result<IncrementSeries> {
        let inc = diffusion_increments(&cfg.heston, &base, &vols, seed)?;
        let prices = assemble_prices(&inc, jumps.as_ref())?;
        Ok(prices.subsample(factor)?.increments())
    };

    // Bandwidth per kernel and frequency.
    let mut setups = Vec::new();
    for &n in &cfg.frequencies {
        let factor = n_base / n;
        for &kernel in &cfg.kernels {
            let spec = KernelSpec::new(kernel)?;
            let h = match &cfg.bandwidth {
                BandwidthChoice::Fixed(h) => *h,
                BandwidthChoice::Cv(c) => {
                    let pilot = simulate_increments(derive_seed(cfg.master_seed, PILOT), factor)?;
                    let grid = BandwidthGrid::new(c.clone(), cfg.window, cfg.horizon)?;
                    bandwidth::cv_bandwidth(&pilot, &spec, &grid, exec)?.chosen
                }
            };
            setups.push(Setup {
                spec,
                n,
                factor,
                h,
            });
        }
    }

    let estimate = |inc: &IncrementSeries, s: &Setup, taus: &[f64]| -> Result<CovPath> {
        match cfg.estimator {
            EstimatorKind::Kcv => estimators::spot_covariance_path(inc, &s.spec, s.h, taus),
            EstimatorKind::Tkcv => {
                let thr = match cfg.threshold {
                    ThresholdChoice::Calibrated { multiplier, beta } => {
                        ThresholdSpec::calibrated(inc, multiplier, beta)?
                    }
                    ThresholdChoice::Fixed(t) => t,
                };
                estimators::threshold_covariance_path(inc, &s.spec, s.h, taus, &thr)
            }
        }
    };

    let replicate = |r: usize| -> Vec<Result<RepCell>> {
        let seed = replication_seed(cfg.master_seed, r as u64);
        let mut by_factor: Vec<(usize, IncrementSeries)> = Vec::new();
        setups
            .iter()
            .map(|s| {
                let inc = match by_factor.iter().find(|(f, _)| *f == s.factor) {
                    Some((_, inc)) => inc.clone(),
                    None => {
                        let inc = simulate_increments(seed, s.factor)?;
                        by_factor.push((s.factor, inc.clone()));
                        inc
                    }
                };
                let path = estimate(&inc, s, &eval_times)?;
                let q_est = estimate(&inc, s, &[qq_time])?.series()[0].clone();
                let est_elem = path.element(ek, el);
                let errors: Vec<f64> = est_elem
                    .iter()
                    .zip(&truth_elem)
                    .map(|(e, t)| e - t)
                    .collect();
                let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
                let ise = bandwidth::trapezoid_on_window(&eval_times, &sq, window)?;
                let delta = inc.grid().delta();
                let z = standardized_errors(
                    core::slice::from_ref(&q_est),
                    &truth_q,
                    &omega_q,
                    delta,
                    s.h,
                    &s.spec,
                )?
                .element(ek, el)[0];
                let band =
                    asymptotic_band(&q_est, &omega(&q_est), delta, s.h, &s.spec, cfg.band_level)?;
                let covered = band.contains(ek, el, truth_q.get(ek, el));
                if !ise.is_finite() || !z.is_finite() {
                    return Err(invalid_state!("non-finite error in replication {r}"));
                }
                Ok(RepCell {
                    ise,
                    errors,
                    z,
                    covered,
                })
            })
            .collect()
    };

    let results: Vec<Vec<Result<RepCell>>> = exec.map(cfg.reps, replicate);

    let m = eval_times.len();
    let mut cells = Vec::with_capacity(setups.len());
    for (c, s) in setups.iter().enumerate() {
        let mut ise_samples = Vec::with_capacity(cfg.reps);
        let mut z_scores = Vec::with_capacity(cfg.reps);
        let mut covered = 0usize;
        let mut mean_err: Vec<CompensatedSum> = (0..m).map(|_| CompensatedSum::new()).collect();
        let mut failed = 0usize;
        let mut first_error = None;
        for rep in &results {
            match &rep[c] {
                Ok(cell) => {
                    ise_samples.push(cell.ise);
                    z_scores.push(cell.z);
                    covered += cell.covered as usize;
                    for (acc, e) in mean_err.iter_mut().zip(&cell.errors) {
                        acc.add(*e);
                    }
                }
                Err(e) => {
                    failed += 1;
                    first_error.get_or_insert_with(|| e.clone());
                }
            }
        }
        if failed as f64 > MAX_FAILURE_RATE * cfg.reps as f64 {
            return Err(invalid_state!(
                "{failed} of {} replications failed for kernel {} at n = {}; first error: {}",
                cfg.reps,
                s.spec.name(),
                s.n,
                first_error.expect("a failure was recorded")
            ));
        }
        let ok = ise_samples.len();
        let bias_sq: Vec<f64> = mean_err
            .iter()
            .map(|acc| {
                let b = acc.value() / ok as f64;
                b * b
            })
            .collect();
        let isb = bandwidth::trapezoid_on_window(&eval_times, &bias_sq, window)?;
        cells.push(McCell {
            kernel: s.spec.kernel(),
            n: s.n,
            delta: cfg.horizon / s.n as f64,
            bandwidth: s.h,
            imse: crate::math::mean(&ise_samples),
            isb,
            reps_ok: ok,
            reps_failed: failed,
            ise_samples,
            z_scores,
            band_coverage: covered as f64 / ok as f64,
        });
    }
    Ok(McReport {
        cells,
        eval_times,
        window,
        qq_time,
        truth,
    })
}

fn check_replications(estimates: &[CovPath], truth: &CovPath) -> Result<()> {
    if estimates.is_empty() {
        return Err(invalid_arg!("need at least one replication"));
    }
    if let Some(bad) = estimates.iter().position(|e| e.times() != truth.times()) {
        return Err(invalid_arg!(
            "replication {bad} is on different evaluation times than the truth"
        ));
    }
    Ok(())
}

/// Mean over replications of the integrated squared error of `element`.
pub fn imse(
    estimates: &[CovPath],
    truth: &CovPath,
    window: (f64, f64),
    element: (usize, usize),
) -> Result<f64> {
    check_replications(estimates, truth)?;
    let sel = ElementSelection::Single(element.0, element.1);
    let mut acc = CompensatedSum::new();
    for e in estimates {
        acc.add(bandwidth::ise(e, truth, window, sel)?);
    }
    Ok(acc.value() / estimates.len() as f64)
}

/// `∫ (mean error)² ds` of `element` over the window.
pub fn isb(
    estimates: &[CovPath],
    truth: &CovPath,
    window: (f64, f64),
    element: (usize, usize),
) -> Result<f64> {
    check_replications(estimates, truth)?;
    let (k, l) = element;
    let d = truth.dim().ok_or_else(|| invalid_arg!("empty truth path"))?;
    if k >= d || l >= d || estimates.iter().any(|e| e.dim() != Some(d)) {
        return Err(invalid_arg!("element ({k},{l}) or dimensions do not match"));
    }
    let t = truth.element(k, l);
    let mut sums: Vec<CompensatedSum> = (0..t.len()).map(|_| CompensatedSum::new()).collect();
    for e in estimates {
        for (acc, (v, tv)) in sums.iter_mut().zip(e.element(k, l).iter().zip(&t)) {
            acc.add(v - tv);
        }
    }
    let r = estimates.len() as f64;
    let sq: Vec<f64> = sums
        .iter()
        .map(|a| {
            let b = a.value() / r;
            b * b
        })
        .collect();
    bandwidth::trapezoid_on_window(truth.times(), &sq, window)
}

/// Normal QQ pairs and the least-squares line `empirical ≈ a + b·theoretical`.
#[derive(Debug, Clone, PartialEq)]
pub struct QqData {
    pub theoretical: Vec<f64>,
    pub empirical: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
}

/// Minimum sample size for [`qq_data`].
pub const QQ_MIN_SAMPLES: usize = 20;

/// Sorted samples against standard normal quantiles at `(i − 0.5)/N`.
pub fn qq_data(z: &[f64]) -> Result<QqData> {
    if z.len() < QQ_MIN_SAMPLES {
        return Err(invalid_arg!(
            "QQ data needs at least {QQ_MIN_SAMPLES} samples, got {}",
            z.len()
        ));
    }
    if z.iter().any(|v| !v.is_finite()) {
        return Err(invalid_arg!("non-finite standardized error"));
    }
    let n = z.len();
    let mut empirical = z.to_vec();
    empirical.sort_by(f64::total_cmp);
    let theoretical: Vec<f64> = (1..=n)
        .map(|i| normal_quantile((i as f64 - 0.5) / n as f64))
        .collect();
    let mx = crate::math::mean(&theoretical);
    let my = crate::math::mean(&empirical);
    let mut sxy = CompensatedSum::new();
    let mut sxx = CompensatedSum::new();
    for (x, y) in theoretical.iter().zip(&empirical) {
        sxy.add((x - mx) * (y - my));
        sxx.add((x - mx) * (x - mx));
    }
    let slope = sxy.value() / sxx.value();
    Ok(QqData {
        intercept: my - slope * mx,
        slope,
        theoretical,
        empirical,
    })
}

/// Kolmogorov–Smirnov distance between the sample and `N(0, 1)`.
pub fn ks_statistic(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
        return Err(invalid_arg!("KS statistic needs finite samples"));
    }
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, v) in x.iter().enumerate() {
        let f = normal_cdf(*v);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Asymptotic 1% critical value `1.6276 / √N` of the one-sample KS test.
pub fn ks_critical_1pct(n: usize) -> f64 {
    1.627_624 / sqrt(n as f64)
}

/// Percentile bootstrap interval for the mean.
pub fn bootstrap_mean_ci(samples: &[f64], level: f64, resamples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples.len() < 2 || resamples < 10 || !(level > 0.0 && level < 1.0) {
        return Err(invalid_arg!(
            "bootstrap needs >= 2 samples, >= 10 resamples and a level in (0, 1)"
        ));
    }
    let n = samples.len();
    let mut rng = rng::stream(derive_seed(seed, "bootstrap"));
    let mut means: Vec<f64> = (0..resamples)
        .map(|_| {
            let mut acc = CompensatedSum::new();
            for _ in 0..n {
                acc.add(samples[rng.random_range(0..n)]);
            }
            acc.value() / n as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    let alpha = 0.5 * (1.0 - level);
    let pick = |p: f64| {
        let i = floor(p * (resamples - 1) as f64 + 0.5) as usize;
        means[i.min(resamples - 1)]
    };
    Ok((pick(alpha), pick(1.0 - alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::timeseries::CovMatrix;

    fn path(times: &[f64], vals: &[f64]) -> CovPath {
        CovPath::new(
            times.to_vec(),
            vals.iter()
                .map(|&v| CovMatrix::from_lower(2, |k, l| if k == l { 1.0 } else { v }))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn imse_isb_hand_values() {
        let t = [0.0, 0.5, 1.0, 1.5, 2.0];
        let truth = path(&t, &[0.3; 5]);
        let up = path(&t, &[0.35; 5]);
        let down = path(&t, &[0.25; 5]);
        let w = (0.5, 1.5);
        assert_eq!(imse(core::slice::from_ref(&truth), &truth, w, (1, 0)).unwrap(), 0.0);
        let m = imse(&[up.clone(), down.clone()], &truth, w, (1, 0)).unwrap();
        assert!((m - 0.0025).abs() < 1e-15);
        let b = isb(&[up.clone(), down], &truth, w, (1, 0)).unwrap();
        assert!(b.abs() < 1e-15);
        let b = isb(&[up.clone(), up.clone()], &truth, w, (1, 0)).unwrap();
        assert!((b - 0.0025).abs() < 1e-15);
        let single = imse(core::slice::from_ref(&up), &truth, w, (1, 0)).unwrap();
        let direct = bandwidth::ise(&up, &truth, w, ElementSelection::Single(1, 0)).unwrap();
        assert_eq!(single, direct);
    }

    #[test]
    fn imse_rejects_grid_mismatch() {
        let truth = path(&[0.0, 1.0, 2.0], &[0.3; 3]);
        let other = path(&[0.0, 1.1, 2.0], &[0.3; 3]);
        assert!(imse(core::slice::from_ref(&other), &truth, (0.5, 1.5), (1, 0)).is_err());
        assert!(isb(&[other], &truth, (0.5, 1.5), (1, 0)).is_err());
        assert!(imse(&[], &truth, (0.5, 1.5), (1, 0)).is_err());
    }

    #[test]
    fn qq_of_exact_quantiles() {
        let n = 200;
        let z: Vec<f64> = (1..=n)
            .map(|i| normal_quantile((i as f64 - 0.5) / n as f64))
            .collect();
        let q = qq_data(&z).unwrap();
        assert!((q.slope - 1.0).abs() < 1e-9);
        assert!(q.intercept.abs() < 1e-9);
        let q = qq_data(&[0.7; 30]).unwrap();
        assert_eq!(q.slope, 0.0);
        assert!(qq_data(&[0.0; 19]).is_err());
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 500;
        let z: Vec<f64> = (1..=n)
            .map(|i| normal_quantile((i as f64 - 0.5) / n as f64))
            .collect();
        let d = ks_statistic(&z).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
        assert!((ks_critical_1pct(500) - 0.0728).abs() < 1e-4);
        let shifted: Vec<f64> = z.iter().map(|v| v + 1.0).collect();
        assert!(ks_statistic(&shifted).unwrap() > 0.3);
    }

    #[test]
    fn bootstrap_brackets_mean() {
        let x: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let (lo, hi) = bootstrap_mean_ci(&x, 0.95, 500, 1).unwrap();
        assert!(lo < 49.5 && 49.5 < hi);
        assert!(hi - lo < 20.0);
        assert_eq!(bootstrap_mean_ci(&x, 0.95, 500, 1).unwrap(), (lo, hi));
    }

    #[test]
    fn small_study_is_structural_and_deterministic() {
        let cfg = McConfig {
            reps: 2,
            frequencies: vec![100],
            kernels: vec![Kernel::Gaussian],
            bandwidth: BandwidthChoice::Fixed(0.2),
            eval_points: 21,
            ..McConfig::default()
        };
        let a = run_mc_study(&cfg, &Sequential).unwrap();
        let b = run_mc_study(&cfg, &Sequential).unwrap();
        assert_eq!(a, b);
        let c = &a.cells[0];
        assert_eq!(c.reps_ok, 2);
        assert_eq!(c.ise_samples.len(), 2);
        assert!(c.imse >= c.isb - 1e-12);
        assert!(c.isb >= 0.0);
        assert_eq!(a.eval_times.len(), 21);
        assert_eq!(a.window, (0.2, 1.8));
    }

    #[test]
    fn config_validation() {
        let mut cfg = McConfig::default();
        cfg.reps = 1;
        assert!(cfg.validate().is_err());
        let mut cfg = McConfig::default();
        cfg.window = (0.0, 1.0);
        assert!(cfg.validate().is_err());
        let mut cfg = McConfig::default();
        cfg.frequencies.clear();
        assert!(cfg.validate().is_err());
    }
}
