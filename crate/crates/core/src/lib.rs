//! Kernel-weighted estimation of spot and integrated covariance matrices from
//! synchronous high-frequency log-prices.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, threads or the command line lives in the `spotcov` crate;
//! here we keep the numerics:
//!
//! * [`timeseries`] – uniform grids, price paths, increments, symmetric
//!   matrices and half-vectorization.
//! * [`kernels`] – smoothing kernels and their closed-form constants.
//! * [`estimators`] – kernel (KCV) and threshold kernel (TKCV) covariance
//!   estimators, the asymptotic variance array and confidence bands.
//! * [`bandwidth`] – integrated squared error and leave-one-out
//!   cross-validation.
//! * [`simulate`] – Euler schemes for correlated Heston and Bates markets.
//! * [`mc`] – Monte Carlo harness (IMSE/ISB, QQ and KS diagnostics).
//! * [`forecast`] – Cholesky-vech VHAR forecasting and matrix loss functions.

// Negated comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;

pub mod bandwidth;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod forecast;
pub mod kernels;
pub mod linalg;
pub mod math;
pub mod mc;
pub mod rng;
pub mod simulate;
pub mod timeseries;

pub use error::{Error, Result};
pub use kernels::{Kernel, KernelSpec};
pub use timeseries::{CovMatrix, CovPath, IncrementSeries, PricePath, TimeGrid};
