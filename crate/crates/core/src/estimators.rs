//! Kernel covariance (KCV) and threshold kernel covariance (TKCV) estimators
//! together with their asymptotic variance.
//!
//! For increments `ΔX_i = X(t_{i+1}) − X(t_i)` the kernel estimate at `τ` is
//!
//! ```text
//! Σ̂(τ) = Σ_i K_h(t_i − τ) ΔX_i ΔX_iᵀ
//! ```
//!
//! and the threshold variant drops increments whose size exceeds a
//! deterministic, step-dependent bound `d · r(δ)` with `r(δ) = c δ^β`. The
//! asymptotic variance of `vec Σ̂` is built from
//! `Ω_{kl,k'l'} = Σ_{kk'} Σ_{ll'} + Σ_{kl'} Σ_{lk'}`.
//!
//! Sums run in time order with compensated accumulation per matrix element,
//! so that two calls with the same admitted increments agree bitwise.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid_arg, invalid_state, Result};
use crate::kernels::{KernelSpec, TRUNCATION};
use crate::math::{ceil, fabs, floor, log, normal_quantile, pow, sqrt, CompensatedSum};
use crate::timeseries::{CovMatrix, CovPath, IncrementSeries};

/// Whether the threshold is applied to `‖ΔX‖²` or `‖ΔX‖`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ThresholdMode {
    /// Keep increments with `‖ΔX‖² ≤ d · r(δ)`.
    #[default]
    SquaredNorm,
    /// Keep increments with `‖ΔX‖ ≤ d · r(δ)`.
    Norm,
}

/// Jump-truncation rule `r(δ) = c · δ^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ThresholdSpec {
    c: f64,
    beta: f64,
    mode: ThresholdMode,
}

/// Rate exponent used by [`ThresholdSpec::calibrated`] unless told otherwise.
pub const DEFAULT_THRESHOLD_BETA: f64 = 0.49;
/// Multiple of the median squared increment admitted by the calibrated rule.
pub const DEFAULT_THRESHOLD_MULTIPLIER: f64 = 9.0;

impl ThresholdSpec {
    /// `c > 0` (may be `+inf`, which admits everything) and `0 < β < 1`.
    pub fn new(c: f64, beta: f64, mode: ThresholdMode) -> Result<Self> {
        if !(c > 0.0) {
            return Err(invalid_arg!("threshold scale c must be positive, got {c}"));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(invalid_arg!("threshold exponent beta must lie in (0, 1), got {beta}"));
        }
        Ok(Self { c, beta, mode })
    }

    /// Scale calibrated from the data so that, at the observed step, the
    /// squared-norm rule keeps increments with
    /// `‖ΔX‖² ≤ multiplier · d · m`, where `m` is the median of `‖ΔX_i‖² / d`.
    ///
    /// That is `c = multiplier · m · δ^{−β}`. The rate in `δ` of the
    /// resulting fixed `(c, β)` rule is unaffected by the calibration.
    pub fn calibrated(increments: &IncrementSeries, multiplier: f64, beta: f64) -> Result<Self> {
        if !(multiplier > 0.0) {
            return Err(invalid_arg!("threshold multiplier must be positive, got {multiplier}"));
        }
        let d = increments.dim() as f64;
        let mut sq: Vec<f64> = increments
            .rows()
            .map(|r| r.iter().map(|x| x * x).sum::<f64>() / d)
            .collect();
        if sq.is_empty() {
            return Err(invalid_arg!("no increments to calibrate the threshold on"));
        }
        sq.sort_by(|a, b| a.total_cmp(b));
        let mid = sq.len() / 2;
        let median = if sq.len() % 2 == 1 {
            sq[mid]
        } else {
            0.5 * (sq[mid - 1] + sq[mid])
        };
        if !(median > 0.0) {
            return Err(invalid_state!("median squared increment is zero"));
        }
        let delta = increments.grid().delta();
        Self::new(
            multiplier * median * pow(delta, -beta),
            beta,
            ThresholdMode::SquaredNorm,
        )
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mode(&self) -> ThresholdMode {
        self.mode
    }

    pub fn with_mode(self, mode: ThresholdMode) -> Self {
        Self { mode, ..self }
    }

    /// `r(δ) = c δ^β`.
    pub fn rate(&self, delta: f64) -> f64 {
        self.c * pow(delta, self.beta)
    }

    /// `d · r(δ)`, the bound the increment size is compared against.
    pub fn bound(&self, d: usize, delta: f64) -> f64 {
        d as f64 * self.rate(delta)
    }

    #[inline]
    fn admits(&self, increment: &[f64], bound: f64) -> bool {
        let sq: f64 = increment.iter().map(|x| x * x).sum();
        match self.mode {
            ThresholdMode::SquaredNorm => sq <= bound,
            ThresholdMode::Norm => sqrt(sq) <= bound,
        }
    }
}

fn check_bandwidth(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(invalid_arg!("bandwidth must be positive and finite, got {h}"));
    }
    Ok(())
}

fn check_tau(increments: &IncrementSeries, tau: f64) -> Result<()> {
    if !increments.grid().contains(tau) {
        return Err(invalid_arg!(
            "evaluation time {tau} outside [0, {}]",
            increments.grid().horizon()
        ));
    }
    Ok(())
}

/// Range of increment indices whose kernel weight may be non-negligible.
fn index_window(increments: &IncrementSeries, spec: &KernelSpec, h: f64, tau: f64) -> (usize, usize) {
    let n = increments.len();
    let delta = increments.grid().delta();
    let (lo, hi) = spec.kernel().effective_support();
    let first = {
        let j = floor((tau + lo * h) / delta) - 1.0;
        if j <= 0.0 {
            0
        } else {
            j as usize
        }
    };
    let last = {
        let j = ceil((tau + hi * h) / delta) + 1.0;
        if j >= (n - 1) as f64 {
            n - 1
        } else if j < 0.0 {
            0
        } else {
            j as usize
        }
    };
    (first.min(n - 1), last)
}

fn accumulate<F>(
    increments: &IncrementSeries,
    spec: &KernelSpec,
    h: f64,
    tau: f64,
    mut keep: F,
) -> Result<CovMatrix>
where
    F: FnMut(&[f64]) -> bool,
{
    if increments.is_empty() {
        return Err(invalid_arg!("empty increment series"));
    }
    check_bandwidth(h)?;
    check_tau(increments, tau)?;
    let d = increments.dim();
    let grid = *increments.grid();
    let kernel = spec.kernel();
    let cutoff = TRUNCATION * kernel.sup();
    let mut acc = vec![CompensatedSum::new(); d * (d + 1) / 2];

    let (first, last) = index_window(increments, spec, h, tau);
    for i in first..=last {
        let k = kernel.eval((grid.point(i) - tau) / h);
        if k < cutoff {
            continue;
        }
        let x = increments.row(i);
        if !keep(x) {
            continue;
        }
        let w = k / h;
        let mut idx = 0;
        for a in 0..d {
            let wa = w * x[a];
            for b in 0..=a {
                acc[idx].add(wa * x[b]);
                idx += 1;
            }
        }
    }

    let mut entries = vec![0.0; d * d];
    let mut idx = 0;
    for a in 0..d {
        for b in 0..=a {
            let v = acc[idx].value();
            entries[a * d + b] = v;
            entries[b * d + a] = v;
            idx += 1;
        }
    }
    CovMatrix::new(d, entries)
}

/// Kernel covariance estimate `Σ_i K_h(t_i − τ) ΔX_i ΔX_iᵀ`.
pub fn kcv(increments: &IncrementSeries, spec: &KernelSpec, h: f64, tau: f64) -> Result<CovMatrix> {
    accumulate(increments, spec, h, tau, |_| true)
}

/// Threshold kernel covariance: [`kcv`] restricted to increments that pass
/// `thr` at the series' step length.
pub fn tkcv(
    increments: &IncrementSeries,
    spec: &KernelSpec,
    h: f64,
    tau: f64,
    thr: &ThresholdSpec,
) -> Result<CovMatrix> {
    let bound = thr.bound(increments.dim(), increments.grid().delta());
    accumulate(increments, spec, h, tau, |x| thr.admits(x, bound))
}

/// [`kcv`] at each of `taus`. All times are checked before any work is done.
pub fn spot_covariance_path(
    increments: &IncrementSeries,
    spec: &KernelSpec,
    h: f64,
    taus: &[f64],
) -> Result<CovPath> {
    check_bandwidth(h)?;
    for &tau in taus {
        check_tau(increments, tau)?;
    }
    let series = taus
        .iter()
        .map(|&tau| kcv(increments, spec, h, tau))
        .collect::<Result<Vec<_>>>()?;
    CovPath::new(taus.to_vec(), series)
}

/// [`tkcv`] at each of `taus`.
pub fn threshold_covariance_path(
    increments: &IncrementSeries,
    spec: &KernelSpec,
    h: f64,
    taus: &[f64],
    thr: &ThresholdSpec,
) -> Result<CovPath> {
    check_bandwidth(h)?;
    for &tau in taus {
        check_tau(increments, tau)?;
    }
    let series = taus
        .iter()
        .map(|&tau| tkcv(increments, spec, h, tau, thr))
        .collect::<Result<Vec<_>>>()?;
    CovPath::new(taus.to_vec(), series)
}

/// `r(δ)` and `δ log(1/δ) / r(δ)` along a decreasing sequence of steps.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRateReport {
    pub deltas: Vec<f64>,
    pub rates: Vec<f64>,
    pub modulus_ratios: Vec<f64>,
    /// `r(δ)` strictly decreasing over the tail.
    pub rate_vanishes: bool,
    /// `δ log(1/δ) / r(δ)` strictly decreasing over the tail.
    pub ratio_vanishes: bool,
}

impl ThresholdRateReport {
    pub fn passes(&self) -> bool {
        self.rate_vanishes && self.ratio_vanishes
    }

    /// True when the modulus ratio fails to decay; with `β` close to 1 the
    /// decay only sets in at very small steps.
    pub fn slow_decay(&self) -> bool {
        !self.ratio_vanishes
    }
}

/// Checks numerically that `r(δ) → 0` and `δ log(1/δ) / r(δ) → 0`.
///
/// The tail is the second half of the sequence (at least two points); both
/// sequences must be strictly decreasing there and end below their value at
/// the start of the sequence.
pub fn validate_threshold_rate(thr: &ThresholdSpec, deltas: &[f64]) -> Result<ThresholdRateReport> {
    if deltas.len() < 2 {
        return Err(invalid_arg!("need at least two step lengths"));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(invalid_arg!("step lengths must lie in (0, 1)"));
    }
    if deltas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid_arg!("step lengths must be strictly decreasing"));
    }
    let rates: Vec<f64> = deltas.iter().map(|&d| thr.rate(d)).collect();
    let ratios: Vec<f64> = deltas
        .iter()
        .zip(&rates)
        .map(|(&d, &r)| d * log(1.0 / d) / r)
        .collect();
    let tail_start = (deltas.len() / 2).min(deltas.len() - 2);
    let vanishes = |s: &[f64]| {
        let tail = &s[tail_start..];
        tail.windows(2).all(|w| w[1] < w[0]) && s[s.len() - 1] < s[0]
    };
    Ok(ThresholdRateReport {
        deltas: deltas.to_vec(),
        rate_vanishes: vanishes(&rates),
        ratio_vanishes: vanishes(&ratios),
        rates,
        modulus_ratios: ratios,
    })
}

/// The `d² × d²` array `Ω_{kl,k'l'} = Σ_{kk'} Σ_{ll'} + Σ_{kl'} Σ_{lk'}`,
/// indexed by pairs `kl ↦ k·d + l`.
#[derive(Debug, Clone, PartialEq)]
pub struct OmegaArray {
    d: usize,
    entries: Vec<f64>,
}

impl OmegaArray {
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize, kp: usize, lp: usize) -> f64 {
        let d = self.d;
        self.entries[(k * d + l) * d * d + kp * d + lp]
    }

    /// Asymptotic variance of element `(k, l)`: `Ω_{kl,kl}`.
    pub fn variance(&self, k: usize, l: usize) -> f64 {
        self.get(k, l, k, l)
    }

    /// Row-major `d² × d²` entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    /// Covariance block of the distinct elements in `vech` order.
    pub fn vech_block(&self) -> Vec<f64> {
        let d = self.d;
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|l| (l..d).map(move |k| (k, l))).collect();
        let m = pairs.len();
        let mut out = vec![0.0; m * m];
        for (i, &(k, l)) in pairs.iter().enumerate() {
            for (j, &(kp, lp)) in pairs.iter().enumerate() {
                out[i * m + j] = self.get(k, l, kp, lp);
            }
        }
        out
    }
}

/// [`OmegaArray`] of a covariance matrix.
pub fn omega(sigma: &CovMatrix) -> OmegaArray {
    let d = sigma.dim();
    let mut entries = vec![0.0; d * d * d * d];
    for k in 0..d {
        for l in 0..d {
            for kp in 0..d {
                for lp in 0..d {
                    entries[(k * d + l) * d * d + kp * d + lp] =
                        sigma.get(k, kp) * sigma.get(l, lp) + sigma.get(k, lp) * sigma.get(l, kp);
                }
            }
        }
    }
    OmegaArray { d, entries }
}

/// [`omega`] of a raw row-major matrix, rejecting asymmetric input.
pub fn omega_of(d: usize, entries: &[f64]) -> Result<OmegaArray> {
    Ok(omega(&CovMatrix::new(d, entries.to_vec())?))
}

/// Element-wise confidence intervals around a spot estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    d: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BandMatrix {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn interval(&self, k: usize, l: usize) -> (f64, f64) {
        let i = k * self.d + l;
        (self.lower[i], self.upper[i])
    }

    pub fn half_width(&self, k: usize, l: usize) -> f64 {
        let (lo, hi) = self.interval(k, l);
        0.5 * (hi - lo)
    }

    pub fn contains(&self, k: usize, l: usize, value: f64) -> bool {
        let (lo, hi) = self.interval(k, l);
        lo <= value && value <= hi
    }
}

fn check_scaling(delta: f64, h: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid_arg!("step length must be positive, got {delta}"));
    }
    check_bandwidth(h)
}

/// Intervals `Σ̂_kl ± z_{(1+level)/2} · sqrt(Ω_{kl,kl} · ∫K² · δ / h)` from the
/// shrinking-bandwidth normal limit.
pub fn asymptotic_band(
    estimate: &CovMatrix,
    omega_hat: &OmegaArray,
    delta: f64,
    h: f64,
    spec: &KernelSpec,
    level: f64,
) -> Result<BandMatrix> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid_arg!("confidence level must lie in (0, 1), got {level}"));
    }
    check_scaling(delta, h)?;
    let d = estimate.dim();
    if omega_hat.dim() != d {
        return Err(invalid_arg!("omega has dimension {}, estimate {d}", omega_hat.dim()));
    }
    let z = normal_quantile(0.5 * (1.0 + level));
    let scale = spec.l2norm() * delta / h;
    let mut lower = vec![0.0; d * d];
    let mut upper = vec![0.0; d * d];
    for k in 0..d {
        for l in 0..d {
            let var = omega_hat.variance(k, l);
            if !(var > 0.0) {
                return Err(invalid_state!(
                    "non-positive asymptotic variance {var} for element ({k},{l})"
                ));
            }
            let half = z * sqrt(var * scale);
            let centre = estimate.get(k, l);
            lower[k * d + l] = centre - half;
            upper[k * d + l] = centre + half;
        }
    }
    Ok(BandMatrix { d, lower, upper })
}

/// Standardized estimation errors per matrix element, one sample per
/// replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ZScores {
    d: usize,
    samples: Vec<Vec<f64>>,
}

impl ZScores {
    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn element(&self, k: usize, l: usize) -> &[f64] {
        &self.samples[k * self.d + l]
    }
}

/// `z_kl = sqrt(h/δ) (Σ̂_kl − Σ_kl) / sqrt(Ω_{kl,kl} ∫K²)` for each estimate.
pub fn standardized_errors(
    estimates: &[CovMatrix],
    truth: &CovMatrix,
    omega_true: &OmegaArray,
    delta: f64,
    h: f64,
    spec: &KernelSpec,
) -> Result<ZScores> {
    check_scaling(delta, h)?;
    let d = truth.dim();
    if omega_true.dim() != d {
        return Err(invalid_arg!("omega has dimension {}, truth {d}", omega_true.dim()));
    }
    if let Some(bad) = estimates.iter().find(|m| m.dim() != d) {
        return Err(invalid_arg!("estimate of dimension {} against truth {d}", bad.dim()));
    }
    let root = sqrt(h / delta);
    let mut samples = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in 0..d {
            let var = omega_true.variance(k, l) * spec.l2norm();
            if !(var > 0.0) {
                return Err(invalid_state!(
                    "zero asymptotic variance for element ({k},{l})"
                ));
            }
            let sd = sqrt(var);
            samples.push(
                estimates
                    .iter()
                    .map(|m| root * (m.get(k, l) - truth.get(k, l)) / sd)
                    .collect(),
            );
        }
    }
    Ok(ZScores { d, samples })
}

/// Relative size `|a − b| / max(|b|, floor)`; used by tests comparing
/// estimators.
pub fn relative_difference(a: f64, b: f64, floor: f64) -> f64 {
    fabs(a - b) / fabs(b).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Kernel;
    use crate::timeseries::TimeGrid;

    fn toy() -> IncrementSeries {
        IncrementSeries::new(TimeGrid::new(1.0, 2).unwrap(), 1, vec![0.1, -0.2]).unwrap()
    }

    #[test]
    fn kcv_hand_example() {
        let spec = KernelSpec::new(Kernel::OneSidedExp).unwrap();
        let m = kcv(&toy(), &spec, 1.0, 1.0).unwrap();
        let expected = (-1.0f64).exp() * 0.01 + (-0.5f64).exp() * 0.04;
        assert!((m.get(0, 0) - expected).abs() < 1e-15);
        // Rounded figure; agrees only to about 1e-6.
        assert!((m.get(0, 0) - 0.027_940_8).abs() < 1e-6);
    }

    #[test]
    fn kcv_of_zero_increments_is_zero() {
        let inc = IncrementSeries::new(TimeGrid::new(1.0, 4).unwrap(), 2, vec![0.0; 8]).unwrap();
        for k in Kernel::ALL {
            let m = kcv(&inc, &KernelSpec::new(k).unwrap(), 0.3, 0.5).unwrap();
            assert!(m.as_slice().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn kcv_with_flat_kernel_is_scaled_realized_covariance() {
        // Uniform kernel with h = T and τ = 0 weights [0, T) by 1/(2T).
        let g = TimeGrid::new(2.0, 8).unwrap();
        let vals: Vec<f64> = (0..16).map(|i| ((i * 7 % 11) as f64 - 5.0) / 100.0).collect();
        let inc = IncrementSeries::new(g, 2, vals.clone()).unwrap();
        let spec = KernelSpec::new(Kernel::Uniform).unwrap();
        let m = kcv(&inc, &spec, 2.0, 0.0).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                let rc: f64 = (0..8).map(|i| vals[2 * i + a] * vals[2 * i + b]).sum();
                assert!((m.get(a, b) - rc / 4.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kcv_errors() {
        let spec = KernelSpec::new(Kernel::Gaussian).unwrap();
        assert!(kcv(&toy(), &spec, 0.0, 0.5).is_err());
        assert!(kcv(&toy(), &spec, 0.1, 1.5).is_err());
        assert!(kcv(&toy(), &spec, 0.1, -0.1).is_err());
    }

    #[test]
    fn tkcv_norm_mode_hand_example() {
        let spec = KernelSpec::new(Kernel::OneSidedExp).unwrap();
        // d r(δ) = 0.15 at δ = 0.5 with d = 1.
        let c = 0.15 / 0.5f64.powf(0.5);
        let thr = ThresholdSpec::new(c, 0.5, ThresholdMode::Norm).unwrap();
        let m = tkcv(&toy(), &spec, 1.0, 1.0, &thr).unwrap();
        assert!((m.get(0, 0) - (-1.0f64).exp() * 0.01).abs() < 1e-15);
        assert!((m.get(0, 0) - 0.003_678_8).abs() < 1e-7);
    }

    #[test]
    fn tkcv_limits() {
        let spec = KernelSpec::new(Kernel::Gaussian).unwrap();
        let inc = toy();
        let open = ThresholdSpec::new(f64::INFINITY, 0.49, ThresholdMode::SquaredNorm).unwrap();
        assert_eq!(
            tkcv(&inc, &spec, 0.4, 0.5, &open).unwrap(),
            kcv(&inc, &spec, 0.4, 0.5).unwrap()
        );
        let closed = ThresholdSpec::new(1e-300, 0.49, ThresholdMode::SquaredNorm).unwrap();
        let m = tkcv(&inc, &spec, 0.4, 0.5, &closed).unwrap();
        assert!(m.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn threshold_spec_validation() {
        assert!(ThresholdSpec::new(1.0, 1.0, ThresholdMode::SquaredNorm).is_err());
        assert!(ThresholdSpec::new(1.0, 0.0, ThresholdMode::SquaredNorm).is_err());
        assert!(ThresholdSpec::new(0.0, 0.5, ThresholdMode::SquaredNorm).is_err());
        assert!(ThresholdSpec::new(f64::NAN, 0.5, ThresholdMode::SquaredNorm).is_err());
    }

    #[test]
    fn threshold_rate_examples() {
        let deltas: Vec<f64> = (1..=6).map(|e| 10f64.powi(-e)).collect();
        let ok = ThresholdSpec::new(1.0, 0.49, ThresholdMode::SquaredNorm).unwrap();
        let report = validate_threshold_rate(&ok, &deltas).unwrap();
        assert!(report.passes());
        assert!(report.modulus_ratios.windows(2).all(|w| w[1] < w[0]));

        let slow = ThresholdSpec::new(1.0, 0.99, ThresholdMode::SquaredNorm).unwrap();
        let report = validate_threshold_rate(&slow, &deltas).unwrap();
        assert!(!report.passes());
        assert!(report.slow_decay());
        // δ^0.01 log(1/δ) at δ = 0.1
        assert!((report.modulus_ratios[0] - 0.1f64.powf(0.01) * 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn omega_examples() {
        let o = omega(&CovMatrix::new(1, vec![2.0]).unwrap());
        assert_eq!(o.as_slice(), &[8.0]);

        let o = omega(&CovMatrix::identity(2));
        assert_eq!(o.get(0, 0, 0, 0), 2.0);
        assert_eq!(o.get(0, 1, 0, 1), 1.0);
        assert_eq!(o.get(0, 0, 0, 1), 0.0);
        assert_eq!(o.get(0, 0, 1, 1), 0.0);

        assert!(omega_of(2, &[1.0, 0.5, 0.4, 1.0]).is_err());
    }

    #[test]
    fn band_half_width() {
        let spec = KernelSpec::new(Kernel::Gaussian).unwrap();
        let est = CovMatrix::new(1, vec![1.0]).unwrap();
        let om = omega(&CovMatrix::new(1, vec![1.0]).unwrap());
        assert_eq!(om.variance(0, 0), 2.0);
        let band = asymptotic_band(&est, &om, 0.01, 1.0, &spec, 0.95).unwrap();
        let expected = 1.959_963_984_540_054 * (2.0 * spec.l2norm() * 0.01f64).sqrt();
        assert!((band.half_width(0, 0) - expected).abs() < 1e-14);
        assert!((band.half_width(0, 0) - 0.1472).abs() < 5e-5);

        let narrow = asymptotic_band(&est, &om, 0.01, 1.0, &spec, 1e-12).unwrap();
        assert!(narrow.half_width(0, 0) < 1e-11);

        assert!(asymptotic_band(&est, &om, 0.01, 1.0, &spec, 1.0).is_err());
        let zero = omega(&CovMatrix::zeros(1));
        assert!(matches!(
            asymptotic_band(&est, &zero, 0.01, 1.0, &spec, 0.95),
            Err(crate::Error::InvalidState(_))
        ));
    }

    #[test]
    fn standardized_errors_basics() {
        let spec = KernelSpec::new(Kernel::Gaussian).unwrap();
        let truth = CovMatrix::new(2, vec![1.0, 0.3, 0.3, 2.0]).unwrap();
        let om = omega(&truth);
        let z = standardized_errors(core::slice::from_ref(&truth), &truth, &om, 0.01, 0.1, &spec).unwrap();
        assert!(z.element(0, 1).iter().all(|&v| v == 0.0));

        let e1 = CovMatrix::new(2, vec![1.1, 0.35, 0.35, 2.2]).unwrap();
        let e2 = CovMatrix::new(2, vec![1.2, 0.4, 0.4, 2.4]).unwrap();
        let z = standardized_errors(&[e1, e2], &truth, &om, 0.01, 0.1, &spec).unwrap();
        for (k, l) in [(0, 0), (0, 1), (1, 1)] {
            let s = z.element(k, l);
            assert!((s[1] - 2.0 * s[0]).abs() < 1e-12);
        }
        assert!(standardized_errors(&[], &CovMatrix::zeros(2), &omega(&CovMatrix::zeros(2)), 0.01, 0.1, &spec).is_err());
    }
}
