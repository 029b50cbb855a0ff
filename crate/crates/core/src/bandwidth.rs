//! Integrated squared error and leave-one-out cross-validation for the
//! bandwidth `h`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid_arg, invalid_state, Result};
use crate::exec::Executor;
use crate::kernels::{KernelSpec, TRUNCATION};
use crate::math::{ceil, floor};
use crate::timeseries::{CovPath, IncrementSeries};

/// Candidate bandwidths and the interior window `[t_l, t_u]` on which the
/// fit is judged.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    candidates: Vec<f64>,
    window: (f64, f64),
}

impl BandwidthGrid {
    /// Candidates must be positive and strictly increasing and the window must
    /// satisfy `0 < t_l < t_u < horizon`.
    pub fn new(candidates: Vec<f64>, window: (f64, f64), horizon: f64) -> Result<Self> {
        if candidates.is_empty() {
            return Err(invalid_arg!("bandwidth grid is empty"));
        }
        if candidates.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(invalid_arg!("bandwidth candidates must be positive and finite"));
        }
        if candidates.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid_arg!("bandwidth candidates must be strictly increasing"));
        }
        check_window(window, horizon)?;
        Ok(Self { candidates, window })
    }

    /// `count` evenly spaced candidates `step, 2·step, …` with the default
    /// window.
    pub fn linear(step: f64, count: usize, horizon: f64) -> Result<Self> {
        let candidates = (1..=count).map(|i| step * i as f64).collect();
        Self::new(candidates, default_window(horizon), horizon)
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }
}

/// Window trimming 10% of the horizon at each end.
pub fn default_window(horizon: f64) -> (f64, f64) {
    (0.1 * horizon, 0.9 * horizon)
}

pub(crate) fn check_window(window: (f64, f64), horizon: f64) -> Result<()> {
    let (lo, hi) = window;
    if !(0.0 < lo && lo < hi && hi < horizon) {
        return Err(invalid_arg!(
            "window [{lo}, {hi}] must satisfy 0 < t_l < t_u < {horizon}"
        ));
    }
    Ok(())
}

/// Which matrix elements enter an error integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ElementSelection {
    /// Every distinct element `k ≥ l`.
    Unique,
    /// A single element, zero-based.
    Single(usize, usize),
}

/// Trapezoid integral over `window` of the piecewise-linear interpolant
/// through `(times, values)`. The window must lie inside the time range.
pub fn trapezoid_on_window(times: &[f64], values: &[f64], window: (f64, f64)) -> Result<f64> {
    let (lo, hi) = window;
    if times.len() != values.len() || times.len() < 2 {
        return Err(invalid_arg!("need at least two matching time/value pairs"));
    }
    if !(lo < hi) {
        return Err(invalid_arg!("empty window [{lo}, {hi}]"));
    }
    if times[0] > lo || times[times.len() - 1] < hi {
        return Err(invalid_arg!(
            "evaluation times [{}, {}] do not cover window [{lo}, {hi}]",
            times[0],
            times[times.len() - 1]
        ));
    }
    let mut acc = 0.0;
    for i in 0..times.len() - 1 {
        let (t0, t1) = (times[i], times[i + 1]);
        let a = t0.max(lo);
        let b = t1.min(hi);
        if a >= b {
            continue;
        }
        let slope = (values[i + 1] - values[i]) / (t1 - t0);
        let fa = values[i] + slope * (a - t0);
        let fb = values[i] + slope * (b - t0);
        acc += 0.5 * (fa + fb) * (b - a);
    }
    Ok(acc)
}

/// Squared error of the selected elements at each evaluation time.
pub(crate) fn squared_errors(
    est: &CovPath,
    truth: &CovPath,
    selection: ElementSelection,
) -> Result<Vec<f64>> {
    if est.times() != truth.times() {
        return Err(invalid_arg!("estimate and truth are on different evaluation times"));
    }
    let d = match (est.dim(), truth.dim()) {
        (Some(a), Some(b)) if a == b => a,
        (None, None) => return Err(invalid_arg!("empty covariance paths")),
        _ => return Err(invalid_arg!("estimate and truth differ in dimension")),
    };
    if let ElementSelection::Single(k, l) = selection {
        if k >= d || l >= d {
            return Err(invalid_arg!("element ({k},{l}) outside a {d}x{d} matrix"));
        }
    }
    Ok(est
        .series()
        .iter()
        .zip(truth.series())
        .map(|(e, t)| match selection {
            ElementSelection::Single(k, l) => {
                let diff = e.get(k, l) - t.get(k, l);
                diff * diff
            }
            ElementSelection::Unique => {
                let mut s = 0.0;
                for k in 0..d {
                    for l in 0..=k {
                        let diff = e.get(k, l) - t.get(k, l);
                        s += diff * diff;
                    }
                }
                s
            }
        })
        .collect())
}

/// `∫_{t_l}^{t_u} (Σ_kl(s) − Σ̂_kl(s))² ds` by the trapezoid rule on the
/// shared evaluation times, summed over the selected elements.
pub fn ise(
    est: &CovPath,
    truth: &CovPath,
    window: (f64, f64),
    selection: ElementSelection,
) -> Result<f64> {
    let sq = squared_errors(est, truth, selection)?;
    trapezoid_on_window(est.times(), &sq, window)
}

/// Cross-validation objective for each candidate and the minimiser.
#[derive(Debug, Clone, PartialEq)]
pub struct CvCurve {
    pub candidates: Vec<f64>,
    /// `+inf` for candidates whose leave-one-out weights all vanish.
    pub values: Vec<f64>,
    pub chosen: f64,
}

/// Leave-one-out cross-validation
///
/// ```text
/// CV(h) = δ Σ_{i : t_i ∈ [t_l, t_u]} ‖ΔX_i ΔX_iᵀ / δ − Σ̂_{−i}(t_i)‖²_F
/// ```
///
/// where `Σ̂_{−i}` is the kernel estimate at `t_i` with increment `i` left
/// out. Ties go to the smaller bandwidth.
pub fn cv_bandwidth<E: Executor>(
    increments: &IncrementSeries,
    spec: &KernelSpec,
    grid: &BandwidthGrid,
    exec: &E,
) -> Result<CvCurve> {
    let horizon = increments.grid().horizon();
    check_window(grid.window, horizon)?;
    let values: Vec<Option<f64>> = exec.map(grid.candidates.len(), |j| {
        cv_objective(increments, spec, grid.candidates[j], grid.window)
    });
    let values: Vec<f64> = values.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
    let mut best: Option<usize> = None;
    for (j, &v) in values.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| v < values[b]) {
            best = Some(j);
        }
    }
    let best = best.ok_or_else(|| {
        invalid_state!("no bandwidth candidate has positive leave-one-out weights")
    })?;
    Ok(CvCurve {
        candidates: grid.candidates.clone(),
        chosen: grid.candidates[best],
        values,
    })
}

/// CV objective for one bandwidth; `None` when every leave-one-out estimate
/// has zero total weight.
pub fn cv_objective(
    increments: &IncrementSeries,
    spec: &KernelSpec,
    h: f64,
    window: (f64, f64),
) -> Option<f64> {
    let g = increments.grid();
    let n = increments.len();
    let d = increments.dim();
    let delta = g.delta();
    let kernel = spec.kernel();
    let cutoff = TRUNCATION * kernel.sup();

    // Weights by lag j − i; the kernel argument is (t_j − t_i)/h = lag δ / h.
    let (lo, hi) = kernel.effective_support();
    let max_back = if lo.is_finite() {
        (ceil(-lo * h / delta) as usize + 1).min(n)
    } else {
        n
    };
    let max_fwd = if hi.is_finite() {
        (ceil(hi * h / delta) as usize + 1).min(n)
    } else {
        n
    };
    let weight = |lag: isize| -> f64 {
        let k = kernel.eval(lag as f64 * delta / h);
        if k < cutoff {
            0.0
        } else {
            k / h
        }
    };
    let back: Vec<f64> = (0..=max_back).map(|s| weight(-(s as isize))).collect();
    let fwd: Vec<f64> = (0..=max_fwd).map(|s| weight(s as isize)).collect();

    let (t_lo, t_hi) = window;
    let first = (ceil(t_lo / delta).max(0.0) as usize).min(n);
    let last = (floor(t_hi / delta) as usize).min(n - 1);
    let mut total = 0.0;
    let mut any_weight = false;
    let mut est = vec![0.0; d * d];
    for i in first..=last {
        let t = g.point(i);
        if t < t_lo || t > t_hi {
            continue;
        }
        est.iter_mut().for_each(|v| *v = 0.0);
        let mut mass = 0.0;
        let add = |j: usize, w: f64, est: &mut [f64]| {
            let x = increments.row(j);
            for a in 0..d {
                for b in 0..=a {
                    est[a * d + b] += w * x[a] * x[b];
                }
            }
        };
        for s in 1..=max_back.min(i) {
            let w = back[s];
            if w != 0.0 {
                mass += w;
                add(i - s, w, &mut est);
            }
        }
        for s in 1..=max_fwd.min(n - 1 - i) {
            let w = fwd[s];
            if w != 0.0 {
                mass += w;
                add(i + s, w, &mut est);
            }
        }
        if mass > 0.0 {
            any_weight = true;
        }
        let x = increments.row(i);
        let mut frob = 0.0;
        for a in 0..d {
            for b in 0..=a {
                let diff = x[a] * x[b] / delta - est[a * d + b];
                frob += if a == b { diff * diff } else { 2.0 * diff * diff };
            }
        }
        total += frob * delta;
    }
    any_weight.then_some(total)
}
