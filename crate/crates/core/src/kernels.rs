//! Smoothing kernels `K` and their scaled forms `K_h(z) = K(z / h) / h`.
//!
//! | name       | `K(u)`                         | support      | `∫K²`        |
//! |------------|--------------------------------|--------------|--------------|
//! | `gaussian` | `exp(−u²/2) / √(2π)`           | ℝ            | `1/(2√π)`    |
//! | `onesided` | `exp(u)` for `u ≤ 0`           | `(−∞, 0]`    | `1/2`        |
//! | `beta`     | `(15/16)(1 − u²)²` on `|u| ≤ 1`| `[−1, 1]`    | `5/7`        |
//! | `uniform`  | `1/2` on `−1 ≤ u < 1`          | `[−1, 1)`    | `1/2`        |
//!
//! The one-sided kernel only weights observations at or before the target
//! time, so the resulting estimate is a filter rather than a smoother. The
//! uniform kernel is half-open so that adjacent windows partition the grid;
//! it is mainly useful to reduce the kernel estimator to realized covariance.

use core::fmt;
use core::str::FromStr;

use crate::error::{invalid_arg, invalid_state, Error, Result};
use crate::math::{exp, fabs, sqrt, SQRT_2PI};

/// Weights below `TRUNCATION · sup K` are skipped by the estimators.
pub const TRUNCATION: f64 = 1e-16;

/// Kernel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Kernel {
    Gaussian,
    #[cfg_attr(feature = "serde", serde(rename = "onesided"))]
    OneSidedExp,
    Beta,
    Uniform,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [
        Kernel::Gaussian,
        Kernel::OneSidedExp,
        Kernel::Beta,
        Kernel::Uniform,
    ];

    /// Name used in configuration files and CSV output.
    pub const fn name(self) -> &'static str {
        match self {
            Kernel::Gaussian => "gaussian",
            Kernel::OneSidedExp => "onesided",
            Kernel::Beta => "beta",
            Kernel::Uniform => "uniform",
        }
    }

    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => exp(-0.5 * u * u) / SQRT_2PI,
            Kernel::OneSidedExp => {
                if u <= 0.0 {
                    exp(u)
                } else {
                    0.0
                }
            }
            Kernel::Beta => {
                if fabs(u) <= 1.0 {
                    let w = 1.0 - u * u;
                    0.9375 * w * w
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

    /// Closed-form `∫K²`.
    pub fn l2_norm(self) -> f64 {
        match self {
            Kernel::Gaussian => 0.5 / sqrt(core::f64::consts::PI),
            Kernel::OneSidedExp => 0.5,
            Kernel::Beta => 5.0 / 7.0,
            Kernel::Uniform => 0.5,
        }
    }

    /// Closure of the support; infinite ends are `±inf`.
    pub fn support(self) -> (f64, f64) {
        match self {
            Kernel::Gaussian => (f64::NEG_INFINITY, f64::INFINITY),
            Kernel::OneSidedExp => (f64::NEG_INFINITY, 0.0),
            Kernel::Beta | Kernel::Uniform => (-1.0, 1.0),
        }
    }

    /// Interval outside of which `K(u) < TRUNCATION · sup K`.
    pub fn effective_support(self) -> (f64, f64) {
        match self {
            // exp(-u²/2) < 1e-16  <=>  |u| > sqrt(2 ln 1e16)
            Kernel::Gaussian => (-8.583_864_105_157_389, 8.583_864_105_157_389),
            Kernel::OneSidedExp => (-36.841_361_487_904_734, 0.0),
            Kernel::Beta | Kernel::Uniform => (-1.0, 1.0),
        }
    }

    pub fn sup(self) -> f64 {
        match self {
            Kernel::Gaussian => 1.0 / SQRT_2PI,
            Kernel::OneSidedExp => 1.0,
            Kernel::Beta => 0.9375,
            Kernel::Uniform => 0.5,
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Kernel::Gaussian),
            "onesided" | "one-sided" | "one-sided-exp" => Ok(Kernel::OneSidedExp),
            "beta" => Ok(Kernel::Beta),
            "uniform" | "flat" => Ok(Kernel::Uniform),
            other => Err(invalid_arg!(
                "unknown kernel {other:?}, expected gaussian | onesided | beta | uniform"
            )),
        }
    }
}

/// A kernel whose normalisation and boundedness have been checked numerically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    kernel: Kernel,
    l2norm: f64,
}

impl KernelSpec {
    /// Checks `∫K = 1` to 1e-8 by Simpson quadrature over the support and
    /// caches `∫K²`.
    pub fn new(kernel: Kernel) -> Result<Self> {
        let mass = simpson_over_support(kernel, |u| kernel.eval(u));
        if fabs(mass - 1.0) > 1e-8 {
            return Err(invalid_state!("kernel {kernel} integrates to {mass}, not 1"));
        }
        Ok(Self {
            kernel,
            l2norm: kernel.l2_norm(),
        })
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn name(&self) -> &'static str {
        self.kernel.name()
    }

    pub fn support(&self) -> (f64, f64) {
        self.kernel.support()
    }

    pub fn l2norm(&self) -> f64 {
        self.l2norm
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.kernel.eval(u)
    }

    /// `K_h(z) = K(z/h)/h`.
    pub fn eval_scaled(&self, h: f64, z: f64) -> Result<f64> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(invalid_arg!("bandwidth must be positive and finite, got {h}"));
        }
        Ok(self.kernel.eval(z / h) / h)
    }
}

impl From<Kernel> for KernelSpec {
    fn from(kernel: Kernel) -> Self {
        KernelSpec::new(kernel).expect("shipped kernels are normalised")
    }
}

/// `K(u)`.
pub fn eval_kernel(spec: &KernelSpec, u: f64) -> f64 {
    spec.eval(u)
}

/// `K_h(z)`; errors for `h <= 0`.
pub fn eval_scaled(spec: &KernelSpec, h: f64, z: f64) -> Result<f64> {
    spec.eval_scaled(h, z)
}

/// Closed-form `∫K²`.
pub fn kernel_l2_norm(spec: &KernelSpec) -> f64 {
    spec.l2norm()
}

fn simpson_over_support(kernel: Kernel, f: impl Fn(f64) -> f64) -> f64 {
    let (lo, hi) = kernel.support();
    let lo = if lo.is_finite() { lo } else { -40.0 };
    let hi = if hi.is_finite() { hi } else { 40.0 };
    let pairs = ((hi - lo) / 2e-3) as usize;
    let steps = 2 * pairs;
    let step = (hi - lo) / steps as f64;
    // Evaluate the upper end from inside so that half-open supports count.
    let mut acc = f(lo) + f(hi - step * 1e-9);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + i as f64 * step);
    }
    acc * step / 3.0
}
