//! Estimators against a naive triple loop written from the definition.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spotcov_core::estimators::{kcv, tkcv, ThresholdMode, ThresholdSpec};
use spotcov_core::{IncrementSeries, Kernel, KernelSpec, TimeGrid};

fn naive_kernel(kernel: Kernel, u: f64) -> f64 {
    match kernel {
        Kernel::Gaussian => (-(u * u) / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt(),
        Kernel::OneSidedExp => {
            if u <= 0.0 {
                u.exp()
            } else {
                0.0
            }
        }
        Kernel::Beta => {
            if u.abs() <= 1.0 {
                15.0 / 16.0 * (1.0 - u * u).powi(2)
            } else {
                0.0
            }
        }
        Kernel::Uniform => {
            if (-1.0..1.0).contains(&u) {
                0.5
            } else {
                0.0
            }
        }
    }
}

/// Returns the estimate and `Σ_i |w_i x_k x_l|` per element.
fn naive(
    x: &[Vec<f64>],
    horizon: f64,
    kernel: Kernel,
    h: f64,
    tau: f64,
    keep: impl Fn(&[f64]) -> bool,
) -> (Vec<f64>, Vec<f64>) {
    let n = x.len();
    let d = x[0].len();
    let mut est = vec![0.0; d * d];
    let mut mag = vec![0.0; d * d];
    for (i, row) in x.iter().enumerate() {
        if !keep(row) {
            continue;
        }
        let t = horizon * i as f64 / n as f64;
        let w = naive_kernel(kernel, (t - tau) / h) / h;
        for k in 0..d {
            for l in 0..d {
                est[k * d + l] += w * row[k] * row[l];
                mag[k * d + l] += (w * row[k] * row[l]).abs();
            }
        }
    }
    (est, mag)
}

fn random_instance(rng: &mut ChaCha8Rng) -> (IncrementSeries, Vec<Vec<f64>>, Kernel, f64, f64) {
    let d = rng.random_range(1..=4);
    let n = rng.random_range(2..=1000);
    let horizon = rng.random_range(0.5..3.0);
    let grid = TimeGrid::new(horizon, n).unwrap();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(-0.02..0.02)).collect())
        .collect();
    let inc = IncrementSeries::new(grid, d, rows.concat()).unwrap();
    let kernel = [Kernel::Gaussian, Kernel::OneSidedExp, Kernel::Beta][rng.random_range(0..3)];
    let delta = horizon / n as f64;
    let h = rng.random_range(delta..horizon);
    let tau = rng.random_range(0.0..=horizon);
    (inc, rows, kernel, h, tau)
}

fn assert_close(est: &[f64], oracle: &[f64], mag: &[f64]) {
    for ((a, b), m) in est.iter().zip(oracle).zip(mag) {
        assert!((a - b).abs() <= 1e-12 * m.max(f64::MIN_POSITIVE), "{a} vs {b} (scale {m})");
    }
}

#[test]
fn kcv_matches_naive_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (inc, rows, kernel, h, tau) = random_instance(&mut rng);
        let est = kcv(&inc, &KernelSpec::new(kernel).unwrap(), h, tau).unwrap();
        let (oracle, mag) = naive(&rows, inc.grid().horizon(), kernel, h, tau, |_| true);
        assert_close(est.as_slice(), &oracle, &mag);
    }
}

#[test]
fn tkcv_matches_naive_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let (inc, rows, kernel, h, tau) = random_instance(&mut rng);
        let d = inc.dim() as f64;
        let delta = inc.grid().delta();
        let mode = if rng.random_bool(0.5) {
            ThresholdMode::SquaredNorm
        } else {
            ThresholdMode::Norm
        };
        // Bound near the typical increment size so that some are dropped.
        let target = match mode {
            ThresholdMode::SquaredNorm => 1e-4,
            ThresholdMode::Norm => 0.015,
        };
        let beta = 0.49;
        let c = target / d / delta.powf(beta);
        let thr = ThresholdSpec::new(c, beta, mode).unwrap();
        let est = tkcv(&inc, &KernelSpec::new(kernel).unwrap(), h, tau, &thr).unwrap();
        let bound = d * c * delta.powf(beta);
        let keep = |x: &[f64]| {
            let sq: f64 = x.iter().map(|v| v * v).sum();
            match mode {
                ThresholdMode::SquaredNorm => sq <= bound,
                ThresholdMode::Norm => sq.sqrt() <= bound,
            }
        };
        let (oracle, mag) = naive(&rows, inc.grid().horizon(), kernel, h, tau, keep);
        assert_close(est.as_slice(), &oracle, &mag);
    }
}
