//! Euler simulation of a bivariate Heston model with CIR variances and of its
//! Bates extension with compound Poisson jumps.
//!
//! Log-prices follow `X_k(t_{i+1}) = X_k(t_i) + μ_k δ + σ_k(t_i) √δ ε_{k,i}`
//! with `corr(ε_1, ε_2) = ρ` and no leverage. Each variance is a CIR process
//! discretised with full truncation:
//!
//! ```text
//! v_{i+1} = max(0, v_i + κ(θ − v_i⁺)δ + η √(v_i⁺) √δ ξ_i)
//! ```
//!
//! Random streams are derived from one seed with the labels in [`crate::rng`]:
//! `vol-1`, `vol-2` for the variances, `diffusion-1`, `diffusion-2` for the
//! price shocks and `jumps` for the jump component, so changing one component
//! never perturbs another.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{invalid_arg, Result};
use crate::math::sqrt;
use crate::rng::{self, derive_seed};
use crate::timeseries::{CovMatrix, CovPath, IncrementSeries, PricePath, TimeGrid};

/// Parameters of one CIR variance process.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CirParams {
    pub kappa: f64,
    pub theta: f64,
    pub eta: f64,
    pub v0: f64,
}

impl CirParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("kappa", self.kappa), ("theta", self.theta), ("v0", self.v0)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid_arg!("CIR {name} must be positive and finite, got {v}"));
            }
        }
        // eta = 0 is allowed: it gives the deterministic mean-reverting path.
        if !(self.eta >= 0.0) || !self.eta.is_finite() {
            return Err(invalid_arg!("CIR eta must be >= 0 and finite, got {}", self.eta));
        }
        Ok(())
    }
}

/// Bivariate Heston model without leverage.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HestonConfig {
    pub mu: [f64; 2],
    pub cir: [CirParams; 2],
    pub rho: f64,
}

impl Default for HestonConfig {
    fn default() -> Self {
        Self {
            mu: [0.0, 0.0],
            cir: [
                CirParams {
                    kappa: 5.0,
                    theta: 0.04,
                    eta: 0.5,
                    v0: 0.04,
                },
                CirParams {
                    kappa: 4.0,
                    theta: 0.09,
                    eta: 0.4,
                    v0: 0.09,
                },
            ],
            rho: 0.5,
        }
    }
}

impl HestonConfig {
    pub fn validate(&self) -> Result<()> {
        for p in &self.cir {
            p.validate()?;
        }
        if !(self.rho.abs() < 1.0) {
            return Err(invalid_arg!("rho must lie in (-1, 1), got {}", self.rho));
        }
        if self.mu.iter().any(|m| !m.is_finite()) {
            return Err(invalid_arg!("drift must be finite"));
        }
        Ok(())
    }
}

/// Compound Poisson jumps with i.i.d. normal sizes.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JumpConfig {
    pub lambda: f64,
    pub jump_mean: [f64; 2],
    pub jump_sd: [f64; 2],
}

impl Default for JumpConfig {
    fn default() -> Self {
        Self {
            lambda: 5.0,
            jump_mean: [0.0, 0.0],
            jump_sd: [0.02, 0.02],
        }
    }
}

impl JumpConfig {
    pub fn none() -> Self {
        Self {
            lambda: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(invalid_arg!("jump intensity must be >= 0, got {}", self.lambda));
        }
        if self.jump_sd.iter().any(|s| !(*s >= 0.0) || !s.is_finite()) {
            return Err(invalid_arg!("jump sd must be >= 0 and finite"));
        }
        if self.jump_mean.iter().any(|m| !m.is_finite()) {
            return Err(invalid_arg!("jump mean must be finite"));
        }
        Ok(())
    }
}

/// One jump: its time, the increment `[t_step, t_{step+1})` containing it and
/// the jump vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpEvent {
    pub time: f64,
    pub step: usize,
    pub sizes: [f64; 2],
}

/// Jump increments per grid step (row-major `n × 2`) and the events.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    pub increments: Vec<f64>,
    pub events: Vec<JumpEvent>,
}

/// Variance paths of both assets on the `n + 1` grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct VolatilityPaths {
    pub variances: [Vec<f64>; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub prices: PricePath,
    /// `Σ(t_i)` at every grid point `t_0, …, t_n`.
    pub true_cov: CovPath,
    pub jumps: Vec<JumpEvent>,
    pub seed: u64,
}

/// One full-truncation Euler step of the CIR recursion for shock `xi`.
#[inline]
pub fn cir_step(p: &CirParams, v: f64, delta: f64, xi: f64) -> f64 {
    let vp = v.max(0.0);
    let next = v + p.kappa * (p.theta - vp) * delta + p.eta * sqrt(vp) * sqrt(delta) * xi;
    next.max(0.0)
}

fn cir_from_stream(p: &CirParams, grid: &TimeGrid, rng: &mut rng::StreamRng) -> Vec<f64> {
    let delta = grid.delta();
    let mut path = Vec::with_capacity(grid.n() + 1);
    let mut v = p.v0;
    path.push(v);
    for _ in 0..grid.n() {
        let xi: f64 = rng.sample(StandardNormal);
        v = cir_step(p, v, delta, xi);
        path.push(v);
    }
    path
}

/// Variance path on the grid points, driven by the stream seeded with `seed`.
pub fn simulate_cir(p: &CirParams, grid: &TimeGrid, seed: u64) -> Result<Vec<f64>> {
    p.validate()?;
    Ok(cir_from_stream(p, grid, &mut rng::stream(seed)))
}

/// Both variance paths, from the `vol-1` and `vol-2` streams of `seed`.
pub fn simulate_volatility(cfg: &HestonConfig, grid: &TimeGrid, seed: u64) -> Result<VolatilityPaths> {
    cfg.validate()?;
    let v1 = simulate_cir(&cfg.cir[0], grid, derive_seed(seed, rng::VOL_1))?;
    let v2 = simulate_cir(&cfg.cir[1], grid, derive_seed(seed, rng::VOL_2))?;
    Ok(VolatilityPaths { variances: [v1, v2] })
}

fn check_vols(grid: &TimeGrid, vols: &VolatilityPaths) -> Result<()> {
    for v in &vols.variances {
        if v.len() != grid.n() + 1 {
            return Err(invalid_arg!(
                "variance path has {} points, grid has {}",
                v.len(),
                grid.n() + 1
            ));
        }
        if v.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(invalid_arg!("variance path must be finite and non-negative"));
        }
    }
    Ok(())
}

/// Diffusive log-price increments given the variance paths, from the
/// `diffusion-1` and `diffusion-2` streams of `seed`.
pub fn diffusion_increments(
    cfg: &HestonConfig,
    grid: &TimeGrid,
    vols: &VolatilityPaths,
    seed: u64,
) -> Result<IncrementSeries> {
    cfg.validate()?;
    check_vols(grid, vols)?;
    let n = grid.n();
    let delta = grid.delta();
    let sd = sqrt(delta);
    let rho_c = sqrt(1.0 - cfg.rho * cfg.rho);
    let mut r1 = rng::stream(derive_seed(seed, rng::DIFFUSION_1));
    let mut r2 = rng::stream(derive_seed(seed, rng::DIFFUSION_2));
    let mut values = Vec::with_capacity(2 * n);
    for i in 0..n {
        let z1: f64 = r1.sample(StandardNormal);
        let z2: f64 = r2.sample(StandardNormal);
        let e2 = cfg.rho * z1 + rho_c * z2;
        let s1 = sqrt(vols.variances[0][i]);
        let s2 = sqrt(vols.variances[1][i]);
        values.push(cfg.mu[0] * delta + s1 * sd * z1);
        values.push(cfg.mu[1] * delta + s2 * sd * e2);
    }
    IncrementSeries::new(*grid, 2, values)
}

/// `Σ(t_i)` with `Σ_12 = ρ σ_1 σ_2` at every grid point.
pub fn true_covariance(cfg: &HestonConfig, grid: &TimeGrid, vols: &VolatilityPaths) -> Result<CovPath> {
    check_vols(grid, vols)?;
    let times: Vec<f64> = grid.points().collect();
    let series = (0..=grid.n())
        .map(|i| {
            let v1 = vols.variances[0][i];
            let v2 = vols.variances[1][i];
            let c = cfg.rho * sqrt(v1) * sqrt(v2);
            CovMatrix::from_lower(2, |k, l| match (k, l) {
                (0, 0) => v1,
                (1, 1) => v2,
                _ => c,
            })
        })
        .collect();
    CovPath::new(times, series)
}

/// Compound Poisson path from the `jumps` stream of `seed`: a Poisson(λT)
/// count, uniform jump times and normal sizes.
pub fn simulate_compound_poisson(jc: &JumpConfig, grid: &TimeGrid, seed: u64) -> Result<JumpPath> {
    jc.validate()?;
    let n = grid.n();
    let mut increments = vec![0.0; 2 * n];
    let mean_count = jc.lambda * grid.horizon();
    if mean_count == 0.0 {
        return Ok(JumpPath {
            increments,
            events: Vec::new(),
        });
    }
    let mut rng = rng::stream(derive_seed(seed, rng::JUMPS));
    let poisson = Poisson::new(mean_count)
        .map_err(|e| invalid_arg!("invalid Poisson mean {mean_count}: {e}"))?;
    let count = poisson.sample(&mut rng) as usize;
    let delta = grid.delta();
    let mut events = Vec::with_capacity(count);
    for _ in 0..count {
        let time = rng.random::<f64>() * grid.horizon();
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let sizes = [
            jc.jump_mean[0] + jc.jump_sd[0] * z1,
            jc.jump_mean[1] + jc.jump_sd[1] * z2,
        ];
        let step = ((time / delta) as usize).min(n - 1);
        events.push(JumpEvent { time, step, sizes });
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time));
    for e in &events {
        increments[2 * e.step] += e.sizes[0];
        increments[2 * e.step + 1] += e.sizes[1];
    }
    Ok(JumpPath { increments, events })
}

/// Log-prices starting at zero from diffusive increments plus optional jumps.
/// Steps without a jump keep the diffusive increment bit for bit.
pub fn assemble_prices(diffusion: &IncrementSeries, jumps: Option<&JumpPath>) -> Result<PricePath> {
    match jumps {
        Some(j) if !j.events.is_empty() => {
            if j.increments.len() != diffusion.values().len() {
                return Err(invalid_arg!("jump path does not match the increment grid"));
            }
            let mut values = diffusion.values().to_vec();
            for e in &j.events {
                let i = 2 * e.step;
                values[i] = diffusion.values()[i] + j.increments[i];
                values[i + 1] = diffusion.values()[i + 1] + j.increments[i + 1];
            }
            IncrementSeries::new(*diffusion.grid(), 2, values)?.cumulate(&[0.0, 0.0])
        }
        _ => diffusion.cumulate(&[0.0, 0.0]),
    }
}

/// Heston log-prices, true covariance and no jumps.
pub fn simulate_heston2d(cfg: &HestonConfig, grid: &TimeGrid, seed: u64) -> Result<SimOutput> {
    let vols = simulate_volatility(cfg, grid, seed)?;
    let inc = diffusion_increments(cfg, grid, &vols, seed)?;
    Ok(SimOutput {
        prices: assemble_prices(&inc, None)?,
        true_cov: true_covariance(cfg, grid, &vols)?,
        jumps: Vec::new(),
        seed,
    })
}

/// [`simulate_heston2d`] plus an independent compound Poisson component.
pub fn simulate_bates2d(
    cfg: &HestonConfig,
    jc: &JumpConfig,
    grid: &TimeGrid,
    seed: u64,
) -> Result<SimOutput> {
    let vols = simulate_volatility(cfg, grid, seed)?;
    let inc = diffusion_increments(cfg, grid, &vols, seed)?;
    let jumps = simulate_compound_poisson(jc, grid, seed)?;
    Ok(SimOutput {
        prices: assemble_prices(&inc, Some(&jumps))?,
        true_cov: true_covariance(cfg, grid, &vols)?,
        jumps: jumps.events,
        seed,
    })
}
