//! Daily covariance forecasting with a vector HAR model on Cholesky factors.
//!
//! Each daily covariance measure `H_t` is factored as `C_t C_tᵀ` and the
//! factor series `RC_t = vech(C_t)` is modelled as
//!
//! ```text
//! RC_{t+1} = α + β_d RC_t + β_w RC_{t−5:t} + β_m RC_{t−22:t} + ε_{t+1}
//! ```
//!
//! with a per-component intercept `α` and scalar slopes shared by all
//! components. Multi-step forecasts iterate the one-step recursion, feeding
//! predictions back as observations, and are mapped back through `C Cᵀ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::bandwidth::trapezoid_on_window;
use crate::error::{invalid_arg, invalid_state, Result};
use crate::estimators::kcv;
use crate::kernels::{Kernel, KernelSpec};
use crate::linalg::{cholesky, least_squares, lower_times_transpose};
use crate::math::{fabs, log, CompensatedSum};
use crate::simulate::{self, HestonConfig, JumpConfig};
use crate::timeseries::{
    unvech_lower, vech, vech_len, vech_lower, CovMatrix, CovPath, PricePath, TimeGrid,
    PSD_SLACK,
};

/// Lags of the weekly and monthly averages.
pub const WEEK: usize = 5;
pub const MONTH: usize = 22;

/// Where the kernel estimate of a day is centred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Anchor {
    /// Middle of the day.
    Midpoint,
    /// Start of the day's last increment, so a one-sided kernel only uses
    /// data up to the day's close.
    End,
}

/// Daily covariance measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DailyMethod {
    /// Sum of the day's outer products.
    Realized,
    /// `kcv` at the anchor time over the whole sample, times the day length.
    Kernel { kernel: Kernel, h: f64, anchor: Anchor },
}

/// One covariance measure per day; `days` must divide the number of
/// increments.
pub fn daily_cov_series(prices: &PricePath, method: &DailyMethod, days: usize) -> Result<Vec<CovMatrix>> {
    let inc = prices.increments();
    let grid = *inc.grid();
    if days == 0 || !grid.n().is_multiple_of(days) {
        return Err(invalid_arg!(
            "{days} days do not align with {} increments",
            grid.n()
        ));
    }
    let per_day = grid.n() / days;
    let d = inc.dim();
    let day_len = grid.horizon() / days as f64;
    match *method {
        DailyMethod::Realized => (0..days)
            .map(|j| {
                let mut acc = vec![CompensatedSum::new(); d * d];
                for i in j * per_day..(j + 1) * per_day {
                    let x = inc.row(i);
                    for a in 0..d {
                        for b in 0..=a {
                            acc[a * d + b].add(x[a] * x[b]);
                        }
                    }
                }
                Ok(CovMatrix::from_lower(d, |a, b| acc[a * d + b].value()))
            })
            .collect(),
        DailyMethod::Kernel { kernel, h, anchor } => {
            let spec = KernelSpec::new(kernel)?;
            (0..days)
                .map(|j| {
                    let tau = match anchor {
                        Anchor::Midpoint => (j as f64 + 0.5) * day_len,
                        Anchor::End => grid.point((j + 1) * per_day - 1),
                    };
                    Ok(kcv(&inc, &spec, h, tau)?.scaled(day_len))
                })
                .collect()
        }
    }
}

/// True daily integrated covariance from a covariance path on grid points,
/// by the trapezoid rule over each day.
pub fn daily_integrated_covariance(truth: &CovPath, grid: &TimeGrid, days: usize) -> Result<Vec<CovMatrix>> {
    if truth.len() != grid.n() + 1 {
        return Err(invalid_arg!("covariance path must hold one matrix per grid point"));
    }
    if days == 0 || !grid.n().is_multiple_of(days) {
        return Err(invalid_arg!("{days} days do not align with {} increments", grid.n()));
    }
    let d = truth.dim().ok_or_else(|| invalid_arg!("empty covariance path"))?;
    let day_len = grid.horizon() / days as f64;
    let elems: Vec<Vec<f64>> = (0..d)
        .flat_map(|k| (0..=k).map(move |l| (k, l)))
        .map(|(k, l)| truth.element(k, l))
        .collect();
    (0..days)
        .map(|j| {
            let w = (j as f64 * day_len, (j + 1) as f64 * day_len);
            let mut vals = Vec::with_capacity(elems.len());
            for e in &elems {
                vals.push(trapezoid_on_window(truth.times(), e, w)?);
            }
            let mut it = vals.into_iter();
            let mut entries = vec![0.0; d * d];
            for k in 0..d {
                for l in 0..=k {
                    let v = it.next().expect("one value per element");
                    entries[k * d + l] = v;
                    entries[l * d + k] = v;
                }
            }
            CovMatrix::new(d, entries)
        })
        .collect()
}

/// `vech` of the Cholesky factor and the diagonal jitter that was needed.
#[derive(Debug, Clone, PartialEq)]
pub struct CholVech {
    pub factor: Vec<f64>,
    pub jitter: f64,
}

/// Lower Cholesky factor with nonnegative diagonal, half-vectorized.
///
/// Matrices with an eigenvalue below `−PSD_SLACK · trace` are rejected. A
/// singular PSD matrix is factored after adding `1e-12 · trace` to the
/// diagonal.
pub fn chol_vech(m: &CovMatrix) -> Result<CholVech> {
    let d = m.dim();
    if !m.is_psd() {
        return Err(invalid_arg!(
            "matrix is not positive semidefinite (smallest eigenvalue {:e})",
            m.eigenvalues()[0]
        ));
    }
    if let Some(l) = cholesky(d, m.as_slice()) {
        return Ok(CholVech {
            factor: vech_lower(d, &l),
            jitter: 0.0,
        });
    }
    let jitter = 1e-12 * fabs(m.trace()).max(f64::MIN_POSITIVE);
    let mut a = m.as_slice().to_vec();
    for k in 0..d {
        a[k * d + k] += jitter;
    }
    match cholesky(d, &a) {
        Some(l) => Ok(CholVech {
            factor: vech_lower(d, &l),
            jitter,
        }),
        None => Err(invalid_arg!(
            "matrix is not positive definite even after jitter {jitter:e} (slack {PSD_SLACK:e})"
        )),
    }
}

/// `C Cᵀ` for the lower factor whose `vech` is `factor`.
pub fn factor_to_cov(d: usize, factor: &[f64]) -> Result<CovMatrix> {
    if factor.len() != vech_len(d) {
        return Err(invalid_arg!("factor of length {} for dimension {d}", factor.len()));
    }
    CovMatrix::new(d, lower_times_transpose(d, &unvech_lower(d, factor)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorSource {
    RealizedCov,
    KernelCov,
    /// Factors supplied directly rather than derived from covariances.
    External,
}

/// Daily Cholesky factors, indexed by day `0, 1, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSeries {
    pub d: usize,
    pub factors: Vec<Vec<f64>>,
    pub source: FactorSource,
    /// Jitter added on each day (zero when none was needed).
    pub jitter: Vec<f64>,
}

impl FactorSeries {
    pub fn from_covariances(covs: &[CovMatrix], source: FactorSource) -> Result<Self> {
        let d = covs
            .first()
            .map(CovMatrix::dim)
            .ok_or_else(|| invalid_arg!("empty covariance series"))?;
        let mut factors = Vec::with_capacity(covs.len());
        let mut jitter = Vec::with_capacity(covs.len());
        for (t, m) in covs.iter().enumerate() {
            if m.dim() != d {
                return Err(invalid_arg!("day {t} has dimension {}, expected {d}", m.dim()));
            }
            let cv = chol_vech(m).map_err(|e| invalid_arg!("day {t}: {e}"))?;
            factors.push(cv.factor);
            jitter.push(cv.jitter);
        }
        Ok(Self {
            d,
            factors,
            source,
            jitter,
        })
    }

    /// Series of raw factor vectors of length `d(d+1)/2`.
    pub fn from_factors(d: usize, factors: Vec<Vec<f64>>) -> Result<Self> {
        let m = vech_len(d);
        if factors.iter().any(|f| f.len() != m || f.iter().any(|v| !v.is_finite())) {
            return Err(invalid_arg!("every factor must hold {m} finite values"));
        }
        let jitter = vec![0.0; factors.len()];
        Ok(Self {
            d,
            factors,
            source: FactorSource::External,
            jitter,
        })
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn width(&self) -> usize {
        vech_len(self.d)
    }

    /// Covariance of day `t` rebuilt from its factor.
    pub fn covariance(&self, t: usize) -> Result<CovMatrix> {
        factor_to_cov(self.d, &self.factors[t])
    }
}

fn average(factors: &[Vec<f64>], k: usize, t: usize) -> Result<Vec<f64>> {
    if k == 0 || t >= factors.len() || t + 1 < k {
        return Err(invalid_arg!(
            "insufficient history for a {k}-day average at day {t} ({} days)",
            factors.len()
        ));
    }
    let m = factors[t].len();
    let mut acc = vec![CompensatedSum::new(); m];
    for f in &factors[t + 1 - k..=t] {
        for (a, v) in acc.iter_mut().zip(f) {
            a.add(*v);
        }
    }
    Ok(acc.iter().map(|a| a.value() / k as f64).collect())
}

/// Mean of the `k` factors ending at day `t`.
pub fn horizon_average(series: &FactorSeries, k: usize, t: usize) -> Result<Vec<f64>> {
    average(&series.factors, k, t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VharModel {
    pub alpha: Vec<f64>,
    pub beta_d: f64,
    pub beta_w: f64,
    pub beta_m: f64,
    /// Stacked residuals, day-major then component.
    pub residuals: Vec<f64>,
    pub residual_sd: f64,
    pub condition: f64,
    pub observations: usize,
}

impl VharModel {
    /// One-step prediction from a history whose last entry is day `t`.
    pub fn predict_next(&self, history: &[Vec<f64>]) -> Result<Vec<f64>> {
        let t = history
            .len()
            .checked_sub(1)
            .ok_or_else(|| invalid_arg!("empty history"))?;
        let w = average(history, WEEK, t)?;
        let mo = average(history, MONTH, t)?;
        Ok((0..self.alpha.len())
            .map(|c| {
                self.alpha[c] + self.beta_d * history[t][c] + self.beta_w * w[c] + self.beta_m * mo[c]
            })
            .collect())
    }
}

/// Regressor rows `[e_c, f_t[c], avg5_t[c], avg22_t[c]]` for targets `t + 1`.
fn design(
    regressors: &[Vec<f64>],
    target: &[Vec<f64>],
) -> Result<(usize, usize, Vec<f64>, Vec<f64>)> {
    let days = regressors.len();
    let m = regressors.first().map_or(0, Vec::len);
    if days < MONTH + 1 {
        return Err(invalid_arg!(
            "insufficient history: {days} days, need at least {}",
            MONTH + 1
        ));
    }
    let cols = m + 3;
    let mut a = Vec::new();
    let mut y = Vec::new();
    for t in (MONTH - 1)..(days - 1) {
        let w = average(regressors, WEEK, t)?;
        let mo = average(regressors, MONTH, t)?;
        for c in 0..m {
            for j in 0..m {
                a.push(if j == c { 1.0 } else { 0.0 });
            }
            a.push(regressors[t][c]);
            a.push(w[c]);
            a.push(mo[c]);
            y.push(target[t + 1][c]);
        }
    }
    let rows = y.len();
    if rows < cols {
        return Err(invalid_arg!(
            "insufficient history: {rows} observations for {cols} coefficients"
        ));
    }
    Ok((rows, cols, a, y))
}

/// Pooled least squares of each day's factors on the previous day's
/// regressors.
pub fn fit_vhar(series: &FactorSeries) -> Result<VharModel> {
    fit_vhar_with_target(series, series)
}

/// As [`fit_vhar`] but with the responses taken from `target`, e.g. the true
/// daily factors when they are available.
pub fn fit_vhar_with_target(regressors: &FactorSeries, target: &FactorSeries) -> Result<VharModel> {
    if regressors.len() != target.len() || regressors.d != target.d {
        return Err(invalid_arg!("regressor and target series differ in shape"));
    }
    let m = regressors.width();
    let (rows, cols, a, y) = design(&regressors.factors, &target.factors)?;
    let ls = least_squares(rows, cols, &a, &y)?;
    let rss: f64 = ls.residuals.iter().map(|r| r * r).sum();
    let dof = (rows - cols).max(1) as f64;
    Ok(VharModel {
        alpha: ls.coefficients[..m].to_vec(),
        beta_d: ls.coefficients[m],
        beta_w: ls.coefficients[m + 1],
        beta_m: ls.coefficients[m + 2],
        residual_sd: crate::math::sqrt(rss / dof),
        residuals: ls.residuals,
        condition: ls.condition,
        observations: rows,
    })
}

/// Factor forecast `horizon` days after the last day of `history`.
pub fn forecast_factor(model: &VharModel, history: &[Vec<f64>], horizon: usize) -> Result<Vec<f64>> {
    if horizon == 0 {
        return Err(invalid_arg!("forecast horizon must be at least 1"));
    }
    if history.len() < MONTH {
        return Err(invalid_arg!(
            "insufficient history: {} days, need {MONTH}",
            history.len()
        ));
    }
    if history.iter().any(|f| f.len() != model.alpha.len()) {
        return Err(invalid_arg!("history width does not match the model"));
    }
    let mut window: Vec<Vec<f64>> = history[history.len() - MONTH..].to_vec();
    let mut next = Vec::new();
    for _ in 0..horizon {
        next = model.predict_next(&window)?;
        window.remove(0);
        window.push(next.clone());
    }
    Ok(next)
}

/// Covariance forecast `horizon` days after the end of `series`.
pub fn forecast_vhar(model: &VharModel, series: &FactorSeries, horizon: usize) -> Result<CovMatrix> {
    factor_to_cov(series.d, &forecast_factor(model, &series.factors, horizon)?)
}

fn check_dims(truth: &CovMatrix, forecast: &CovMatrix) -> Result<usize> {
    if truth.dim() != forecast.dim() {
        return Err(invalid_arg!(
            "dimension mismatch: truth {} vs forecast {}",
            truth.dim(),
            forecast.dim()
        ));
    }
    Ok(truth.dim())
}

/// `vech(Σ − H)ᵀ vech(Σ − H)`.
pub fn loss_euclidean(truth: &CovMatrix, forecast: &CovMatrix) -> Result<f64> {
    check_dims(truth, forecast)?;
    Ok(vech(&truth.sub(forecast)?).iter().map(|e| e * e).sum())
}

/// `tr[(Σ − H)ᵀ(Σ − H)]`.
pub fn loss_frobenius(truth: &CovMatrix, forecast: &CovMatrix) -> Result<f64> {
    check_dims(truth, forecast)?;
    Ok(truth.sub(forecast)?.as_slice().iter().map(|e| e * e).sum())
}

/// `log|H| + tr(H⁻¹ Σ)`; `H` must be positive definite.
pub fn loss_qlike(truth: &CovMatrix, forecast: &CovMatrix) -> Result<f64> {
    let d = check_dims(truth, forecast)?;
    let l = cholesky(d, forecast.as_slice())
        .ok_or_else(|| invalid_arg!("forecast is singular or not positive definite"))?;
    let logdet: f64 = (0..d).map(|i| 2.0 * log(l[i * d + i])).sum();
    // N = L⁻¹ Σ L⁻ᵀ by two forward substitutions; tr(H⁻¹Σ) = tr(N).
    let forward = |b: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; d * d];
        for col in 0..d {
            for i in 0..d {
                let mut s = b[i * d + col];
                for p in 0..i {
                    s -= l[i * d + p] * x[p * d + col];
                }
                x[i * d + col] = s / l[i * d + i];
            }
        }
        x
    };
    let m = forward(truth.as_slice());
    let mut mt = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..d {
            mt[i * d + j] = m[j * d + i];
        }
    }
    let n = forward(&mt);
    let trace: f64 = (0..d).map(|i| n[i * d + i]).sum();
    Ok(logdet + trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossName {
    Euclidean,
    Frobenius,
    Qlike,
}

impl LossName {
    pub const ALL: [LossName; 3] = [LossName::Euclidean, LossName::Frobenius, LossName::Qlike];

    pub fn name(self) -> &'static str {
        match self {
            LossName::Euclidean => "L_E",
            LossName::Frobenius => "L_F",
            LossName::Qlike => "L_Q",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelName {
    VharRc,
    VharKcv,
}

impl ModelName {
    pub const ALL: [ModelName; 2] = [ModelName::VharRc, ModelName::VharKcv];

    pub fn name(self) -> &'static str {
        match self {
            ModelName::VharRc => "vhar-rc",
            ModelName::VharKcv => "vhar-kcv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossEntry {
    pub model: ModelName,
    pub horizon: usize,
    pub loss: LossName,
    pub value: f64,
}

/// Mean out-of-sample losses per model, horizon and loss function.
#[derive(Debug, Clone, PartialEq)]
pub struct LossReport {
    pub entries: Vec<LossEntry>,
}

impl LossReport {
    pub fn get(&self, model: ModelName, horizon: usize, loss: LossName) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.model == model && e.horizon == horizon && e.loss == loss)
            .map(|e| e.value)
    }
}

/// Response used when fitting the VHAR regressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum VharTarget {
    /// Each model forecasts its own measure.
    Own,
    /// Both models are fitted against the true daily factors.
    Truth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastConfig {
    pub heston: HestonConfig,
    /// Added jumps, if any.
    pub jumps: Option<JumpConfig>,
    pub days: usize,
    pub steps_per_day: usize,
    pub kernel: Kernel,
    /// Bandwidth in days.
    pub h: f64,
    pub anchor: Anchor,
    pub train_fraction: f64,
    pub horizons: Vec<usize>,
    pub target: VharTarget,
    pub seed: u64,
}

impl Default for ForecastConfig {
    fn default() -> Self {
        use crate::simulate::CirParams;
        Self {
            // Daily time unit, returns in percent: about 1% and 1.2% daily
            // volatility with slowly mean-reverting variances.
            heston: HestonConfig {
                mu: [0.0, 0.0],
                cir: [
                    CirParams {
                        kappa: 0.1,
                        theta: 1.0,
                        eta: 0.2,
                        v0: 1.0,
                    },
                    CirParams {
                        kappa: 0.08,
                        theta: 1.5,
                        eta: 0.2,
                        v0: 1.5,
                    },
                ],
                rho: 0.5,
            },
            jumps: None,
            days: 120,
            steps_per_day: 288,
            kernel: Kernel::Gaussian,
            h: 0.5,
            anchor: Anchor::Midpoint,
            train_fraction: 0.8,
            horizons: vec![1, 5, 22],
            target: VharTarget::Own,
            seed: 1,
        }
    }
}

impl ForecastConfig {
    pub fn validate(&self) -> Result<()> {
        self.heston.validate()?;
        if let Some(j) = &self.jumps {
            j.validate()?;
        }
        if self.steps_per_day < 2 {
            return Err(invalid_arg!("need at least 2 steps per day"));
        }
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(invalid_arg!("bandwidth must be positive, got {}", self.h));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(invalid_arg!("train fraction must lie in (0, 1)"));
        }
        if self.horizons.is_empty() || self.horizons.contains(&0) {
            return Err(invalid_arg!("horizons must be nonempty and positive"));
        }
        let train = self.train_days();
        let max_h = *self.horizons.iter().max().expect("nonempty");
        if train < MONTH + 2 || self.days <= train {
            return Err(invalid_arg!(
                "insufficient history: {} days with {train} training days",
                self.days
            ));
        }
        if train < MONTH + max_h {
            return Err(invalid_arg!(
                "insufficient history: {train} training days for horizon {max_h}"
            ));
        }
        Ok(())
    }

    pub fn train_days(&self) -> usize {
        crate::math::floor(self.train_fraction * self.days as f64) as usize
    }
}

/// Everything produced by [`compare_models`].
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastComparison {
    pub report: LossReport,
    pub rc_series: FactorSeries,
    pub kcv_series: FactorSeries,
    pub truth: Vec<CovMatrix>,
    pub rc_model: VharModel,
    pub kcv_model: VharModel,
}

/// Simulates `cfg.days` days, builds realized and kernel factor series, fits
/// one VHAR per series on the training days and scores out-of-sample
/// forecasts against the true daily integrated covariance.
pub fn compare_models(cfg: &ForecastConfig) -> Result<ForecastComparison> {
    cfg.validate()?;
    let grid = TimeGrid::new(cfg.days as f64, cfg.days * cfg.steps_per_day)?;
    let sim = match &cfg.jumps {
        Some(j) => simulate::simulate_bates2d(&cfg.heston, j, &grid, cfg.seed)?,
        None => simulate::simulate_heston2d(&cfg.heston, &grid, cfg.seed)?,
    };
    let truth = daily_integrated_covariance(&sim.true_cov, &grid, cfg.days)?;
    let rc = daily_cov_series(&sim.prices, &DailyMethod::Realized, cfg.days)?;
    let kc = daily_cov_series(
        &sim.prices,
        &DailyMethod::Kernel {
            kernel: cfg.kernel,
            h: cfg.h,
            anchor: cfg.anchor,
        },
        cfg.days,
    )?;
    let rc_series = FactorSeries::from_covariances(&rc, FactorSource::RealizedCov)?;
    let kcv_series = FactorSeries::from_covariances(&kc, FactorSource::KernelCov)?;
    let evaluated = evaluate_forecasts(&rc_series, &kcv_series, &truth, cfg)?;
    Ok(ForecastComparison {
        report: evaluated.0,
        rc_model: evaluated.1,
        kcv_model: evaluated.2,
        rc_series,
        kcv_series,
        truth,
    })
}

/// Fits both models on the training days and averages the losses of the
/// forecasts of each test day `s` made at origin `s − horizon`.
pub fn evaluate_forecasts(
    rc: &FactorSeries,
    kc: &FactorSeries,
    truth: &[CovMatrix],
    cfg: &ForecastConfig,
) -> Result<(LossReport, VharModel, VharModel)> {
    let days = truth.len();
    if rc.len() != days || kc.len() != days {
        return Err(invalid_arg!("factor series and truth differ in length"));
    }
    let train = crate::math::floor(cfg.train_fraction * days as f64) as usize;
    let max_h = cfg.horizons.iter().copied().max().unwrap_or(1);
    if train < MONTH + max_h || train >= days {
        return Err(invalid_arg!(
            "insufficient history: {train} training days of {days} for horizon {max_h}"
        ));
    }
    let fit = |s: &FactorSeries| -> Result<VharModel> {
        let head = FactorSeries {
            d: s.d,
            factors: s.factors[..train].to_vec(),
            source: s.source,
            jitter: s.jitter[..train].to_vec(),
        };
        match cfg.target {
            VharTarget::Own => fit_vhar(&head),
            VharTarget::Truth => {
                let t = FactorSeries::from_covariances(&truth[..train], FactorSource::External)?;
                fit_vhar_with_target(&head, &t)
            }
        }
    };
    let rc_model = fit(rc)?;
    let kc_model = fit(kc)?;
    let mut entries = Vec::with_capacity(2 * cfg.horizons.len() * 3);
    for (name, model, series) in [
        (ModelName::VharRc, &rc_model, rc),
        (ModelName::VharKcv, &kc_model, kc),
    ] {
        for &h in &cfg.horizons {
            let mut sums = [CompensatedSum::new(), CompensatedSum::new(), CompensatedSum::new()];
            let mut count = 0usize;
            for s in train..days {
                let origin = s - h;
                let f = forecast_factor(model, &series.factors[..=origin], h)?;
                let hmat = factor_to_cov(series.d, &f)?;
                sums[0].add(loss_euclidean(&truth[s], &hmat)?);
                sums[1].add(loss_frobenius(&truth[s], &hmat)?);
                sums[2].add(loss_qlike(&truth[s], &hmat).map_err(|e| {
                    invalid_state!("day {s}, horizon {h}: {e}")
                })?);
                count += 1;
            }
            for (loss, acc) in LossName::ALL.iter().zip(&sums) {
                entries.push(LossEntry {
                    model: name,
                    horizon: h,
                    loss: *loss,
                    value: acc.value() / count as f64,
                });
            }
        }
    }
    Ok((LossReport { entries }, rc_model, kc_model))
}
