//! Monte Carlo checks of the simulated processes against their known moments.

use spotcov_core::rng::derive_seed;
use spotcov_core::simulate::{
    diffusion_increments, simulate_bates2d, simulate_cir, simulate_compound_poisson,
    simulate_heston2d, simulate_volatility, CirParams, HestonConfig, JumpConfig,
};
use spotcov_core::TimeGrid;

#[test]
fn cir_long_run_mean() {
    let p = CirParams { kappa: 2.0, theta: 0.04, eta: 0.2, v0: 0.04 };
    let grid = TimeGrid::new(1000.0, 100_000).unwrap();
    let path = simulate_cir(&p, &grid, 17).unwrap();
    assert!(path.iter().all(|v| *v >= 0.0));
    let mean = path.iter().sum::<f64>() / path.len() as f64;
    assert!((mean / p.theta - 1.0).abs() < 0.05, "mean {mean}");
}

#[test]
fn cir_truncation_keeps_variance_nonnegative() {
    // Feller condition badly violated.
    let p = CirParams { kappa: 0.5, theta: 0.01, eta: 2.0, v0: 0.01 };
    let grid = TimeGrid::new(10.0, 10_000).unwrap();
    let path = simulate_cir(&p, &grid, 3).unwrap();
    assert!(path.iter().all(|v| *v >= 0.0));
    assert!(path.contains(&0.0));
}

#[test]
fn constant_variance_increment_moments() {
    let theta = [0.04, 0.09];
    let cfg = HestonConfig {
        mu: [0.0, 0.0],
        cir: [
            CirParams { kappa: 1.0, theta: theta[0], eta: 0.0, v0: theta[0] },
            CirParams { kappa: 1.0, theta: theta[1], eta: 0.0, v0: theta[1] },
        ],
        rho: 0.0,
    };
    let n = 100_000;
    let grid = TimeGrid::new(1.0, n).unwrap();
    let delta = grid.delta();
    let out = simulate_heston2d(&cfg, &grid, 8).unwrap();
    let inc = out.prices.increments();
    let mut s = [0.0f64; 3];
    for x in inc.rows() {
        s[0] += x[0] * x[0];
        s[1] += x[1] * x[0];
        s[2] += x[1] * x[1];
    }
    let m = s.map(|v| v / n as f64);
    // Standard errors of sample second moments of Gaussian increments.
    let se11 = (2.0f64).sqrt() * theta[0] * delta / (n as f64).sqrt();
    let se22 = (2.0f64).sqrt() * theta[1] * delta / (n as f64).sqrt();
    let se12 = (theta[0] * theta[1]).sqrt() * delta / (n as f64).sqrt();
    assert!((m[0] - theta[0] * delta).abs() < 3.0 * se11);
    assert!((m[2] - theta[1] * delta).abs() < 3.0 * se22);
    assert!(m[1].abs() < 3.0 * se12);
}

#[test]
fn correlation_of_price_shocks() {
    let cfg = HestonConfig::default();
    let grid = TimeGrid::new(2.0, 50_000).unwrap();
    let vols = simulate_volatility(&cfg, &grid, 4).unwrap();
    let inc = diffusion_increments(&cfg, &grid, &vols, 4).unwrap();
    // Standardize by the known spot volatilities.
    let sd = grid.delta().sqrt();
    let mut c = 0.0;
    for (i, x) in inc.rows().enumerate() {
        c += x[0] / (vols.variances[0][i].sqrt() * sd) * x[1] / (vols.variances[1][i].sqrt() * sd);
    }
    let r = c / inc.len() as f64;
    let se = (1.0 + cfg.rho * cfg.rho).sqrt() / (inc.len() as f64).sqrt();
    assert!((r - cfg.rho).abs() < 3.0 * se, "corr {r}");
}

#[test]
fn poisson_count_mean() {
    let jc = JumpConfig { lambda: 5.0, jump_mean: [0.0, 0.0], jump_sd: [0.01, 0.01] };
    let grid = TimeGrid::new(2.0, 100).unwrap();
    // 8·10⁴ paths: tighter than 10⁴ in absolute terms.
    let seeds = 80_000;
    let total: usize = (0..seeds)
        .map(|s| simulate_compound_poisson(&jc, &grid, s).unwrap().events.len())
        .sum();
    let mean = total as f64 / seeds as f64;
    let se = (10.0f64 / seeds as f64).sqrt();
    assert!((mean - 10.0).abs() < 3.0 * se, "mean count {mean}");
}

#[test]
fn fraction_of_jump_steps() {
    let jc = JumpConfig { lambda: 2.0, jump_mean: [0.0, 0.0], jump_sd: [0.05, 0.05] };
    let grid = TimeGrid::new(2.0, 200).unwrap();
    let paths = 500;
    let mut hit = 0usize;
    for s in 0..paths {
        let jp = simulate_compound_poisson(&jc, &grid, 1000 + s).unwrap();
        let mut steps: Vec<usize> = jp.events.iter().map(|e| e.step).collect();
        steps.dedup();
        hit += steps.len();
    }
    let total = (paths * grid.n() as u64) as f64;
    let frac = hit as f64 / total;
    let p = 1.0 - (-jc.lambda * grid.delta()).exp();
    let se = (p * (1.0 - p) / total).sqrt();
    assert!((frac - p).abs() < 3.0 * se, "fraction {frac} vs {p}");
}

#[test]
fn streams_are_independent() {
    let cfg = HestonConfig::default();
    let grid = TimeGrid::new(2.0, 1000).unwrap();
    let a = JumpConfig { lambda: 3.0, ..JumpConfig::default() };
    let b = JumpConfig { lambda: 9.0, jump_sd: [0.1, 0.2], ..JumpConfig::default() };
    let sa = simulate_bates2d(&cfg, &a, &grid, 21).unwrap();
    let sb = simulate_bates2d(&cfg, &b, &grid, 21).unwrap();
    assert_eq!(sa.true_cov, sb.true_cov);
    // The jump stream depends on the seed only through its own label.
    assert_ne!(derive_seed(21, "jumps"), derive_seed(21, "diffusion-1"));
    let vols = simulate_volatility(&cfg, &grid, 21).unwrap();
    let d1 = diffusion_increments(&cfg, &grid, &vols, 21).unwrap();
    let h = simulate_heston2d(&cfg, &grid, 21).unwrap();
    assert_eq!(h.prices, d1.cumulate(&[0.0, 0.0]).unwrap());
    // Steps without a jump carry the diffusive increment.
    let ia = sa.prices.increments();
    for i in 0..grid.n() {
        if sa.jumps.iter().all(|e| e.step != i) {
            for k in 0..2 {
                assert!((ia.row(i)[k] - d1.row(i)[k]).abs() < 1e-14);
            }
        }
    }
}
