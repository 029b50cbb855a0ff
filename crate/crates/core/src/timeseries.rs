//! Core data types: uniform time grids, multivariate log-price paths, their
//! increments and symmetric covariance matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid_arg, Result};
use crate::linalg;
use crate::math::fabs;

/// Absolute tolerance for the symmetry check on [`CovMatrix`].
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Eigenvalues down to `-PSD_SLACK * trace` are accepted as PSD.
pub const PSD_SLACK: f64 = 1e-10;

/// Uniform observation grid `t_i = i T / n` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TimeGrid {
    horizon: f64,
    n: usize,
}

impl TimeGrid {
    /// Grid with `n` increments over `[0, horizon]`.
    pub fn new(horizon: f64, n: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(invalid_arg!("horizon must be positive and finite, got {horizon}"));
        }
        if n < 2 {
            return Err(invalid_arg!("need at least 2 increments, got {n}"));
        }
        Ok(Self { horizon, n })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Number of increments (the grid has `n + 1` points).
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.horizon / self.n as f64
    }

    /// `t_i`. The last point is exactly `T`.
    #[inline]
    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.horizon / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.point(i))
    }

    /// Whether `t` lies in `[0, T]`.
    pub fn contains(&self, t: f64) -> bool {
        (0.0..=self.horizon).contains(&t)
    }

    /// Grid keeping every `factor`-th point.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.n.is_multiple_of(factor) {
            return Err(invalid_arg!(
                "coarsening factor {factor} does not divide {} increments",
                self.n
            ));
        }
        Self::new(self.horizon, self.n / factor)
    }
}

/// Synchronous log-prices of `d` assets on a [`TimeGrid`], row-major
/// `(n + 1) × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath {
    grid: TimeGrid,
    d: usize,
    values: Vec<f64>,
}

impl PricePath {
    pub fn new(grid: TimeGrid, d: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(invalid_arg!("asset count must be positive"));
        }
        if values.len() != (grid.n() + 1) * d {
            return Err(invalid_arg!(
                "expected {} rows of {d} prices, got {} values",
                grid.n() + 1,
                values.len()
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid_arg!("non-finite price in row {}", pos / d));
        }
        Ok(Self { grid, d, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    /// Path observed at every `factor`-th grid point.
    pub fn subsample(&self, factor: usize) -> Result<Self> {
        let grid = self.grid.coarsen(factor)?;
        let mut values = Vec::with_capacity((grid.n() + 1) * self.d);
        for i in 0..=grid.n() {
            values.extend_from_slice(self.row(i * factor));
        }
        Ok(Self {
            grid,
            d: self.d,
            values,
        })
    }

    pub fn increments(&self) -> IncrementSeries {
        log_returns(self)
    }
}

/// Increments `ΔX(t_{i-1}) = X(t_i) − X(t_{i-1})`, row-major `n × d`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSeries {
    grid: TimeGrid,
    d: usize,
    values: Vec<f64>,
}

impl IncrementSeries {
    pub fn new(grid: TimeGrid, d: usize, values: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(invalid_arg!("asset count must be positive"));
        }
        if values.len() != grid.n() * d {
            return Err(invalid_arg!(
                "expected {} increments of dimension {d}, got {} values",
                grid.n(),
                values.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid_arg!("non-finite increment"));
        }
        Ok(Self { grid, d, values })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.grid.n()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Increment over `[t_i, t_{i+1}]`, i.e. `ΔX(t_i)`.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    /// Re-accumulates the increments from `start`.
    pub fn cumulate(&self, start: &[f64]) -> Result<PricePath> {
        if start.len() != self.d {
            return Err(invalid_arg!("start has {} entries, need {}", start.len(), self.d));
        }
        let mut values = Vec::with_capacity((self.len() + 1) * self.d);
        values.extend_from_slice(start);
        for i in 0..self.len() {
            for k in 0..self.d {
                let prev = values[i * self.d + k];
                values.push(prev + self.values[i * self.d + k]);
            }
        }
        PricePath::new(self.grid, self.d, values)
    }
}

/// First differences of a price path.
pub fn log_returns(path: &PricePath) -> IncrementSeries {
    let d = path.d;
    let n = path.grid.n();
    let mut values = Vec::with_capacity(n * d);
    for i in 0..n {
        for k in 0..d {
            values.push(path.values[(i + 1) * d + k] - path.values[i * d + k]);
        }
    }
    IncrementSeries {
        grid: path.grid,
        d,
        values,
    }
}

/// Symmetric `d × d` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    d: usize,
    entries: Vec<f64>,
}

impl CovMatrix {
    /// Validates finiteness and symmetry to [`SYMMETRY_TOL`]. The stored
    /// matrix is exactly symmetrised (lower triangle mirrored).
    pub fn new(d: usize, mut entries: Vec<f64>) -> Result<Self> {
        if d == 0 {
            return Err(invalid_arg!("dimension must be positive"));
        }
        if entries.len() != d * d {
            return Err(invalid_arg!("expected {} entries, got {}", d * d, entries.len()));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid_arg!("non-finite matrix entry"));
        }
        for k in 0..d {
            for l in 0..k {
                let a = entries[k * d + l];
                let b = entries[l * d + k];
                if fabs(a - b) > SYMMETRY_TOL {
                    return Err(invalid_arg!(
                        "matrix not symmetric: entries ({k},{l})={a} and ({l},{k})={b}"
                    ));
                }
                entries[l * d + k] = a;
            }
        }
        Ok(Self { d, entries })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            d,
            entries: vec![0.0; d * d],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d);
        for k in 0..d {
            m.entries[k * d + k] = 1.0;
        }
        m
    }

    /// Builds from the lower triangle; `f(k, l)` is called for `l <= k`.
    pub fn from_lower(d: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = vec![0.0; d * d];
        for k in 0..d {
            for l in 0..=k {
                let v = f(k, l);
                entries[k * d + l] = v;
                entries[l * d + k] = v;
            }
        }
        Self { d, entries }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.entries[k * self.d + l]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.d).map(|k| self.get(k, k)).sum()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            d: self.d,
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    /// Entrywise difference `self − other`.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(invalid_arg!("dimension mismatch: {} vs {}", self.d, other.d));
        }
        Ok(Self {
            d: self.d,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::symmetric_eigenvalues(self.d, &self.entries)
    }

    /// All eigenvalues at least `-PSD_SLACK · |trace|`.
    pub fn is_psd(&self) -> bool {
        let slack = PSD_SLACK * fabs(self.trace());
        self.eigenvalues().iter().all(|&e| e >= -slack)
    }
}

/// Time-indexed sequence of covariance matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CovPath {
    times: Vec<f64>,
    series: Vec<CovMatrix>,
}

impl CovPath {
    pub fn new(times: Vec<f64>, series: Vec<CovMatrix>) -> Result<Self> {
        if times.len() != series.len() {
            return Err(invalid_arg!(
                "{} times for {} matrices",
                times.len(),
                series.len()
            ));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(invalid_arg!("evaluation times must be strictly increasing"));
        }
        if let Some(first) = series.first() {
            if series.iter().any(|m| m.dim() != first.dim()) {
                return Err(invalid_arg!("matrices of mixed dimension"));
            }
        }
        Ok(Self { times, series })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn series(&self) -> &[CovMatrix] {
        &self.series
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.series.first().map(CovMatrix::dim)
    }

    /// Values of element `(k, l)` along the path.
    pub fn element(&self, k: usize, l: usize) -> Vec<f64> {
        self.series.iter().map(|m| m.get(k, l)).collect()
    }
}

/// Length of the half-vectorization of a `d × d` matrix.
pub const fn vech_len(d: usize) -> usize {
    d * (d + 1) / 2
}

/// Inverse of [`vech_len`].
pub fn dim_from_vech_len(m: usize) -> Option<usize> {
    let mut d = 0;
    while vech_len(d) < m {
        d += 1;
    }
    (vech_len(d) == m && d > 0).then_some(d)
}

/// Lower triangle stacked column by column: `(m11, m21, …, md1, m22, …)`.
pub fn vech(m: &CovMatrix) -> Vec<f64> {
    vech_lower(m.d, &m.entries)
}

/// [`vech`] of a raw row-major matrix, which must be symmetric to
/// [`SYMMETRY_TOL`].
pub fn vech_symmetric(d: usize, entries: &[f64]) -> Result<Vec<f64>> {
    let m = CovMatrix::new(d, entries.to_vec())?;
    Ok(vech(&m))
}

/// Lower triangle (diagonal included) of any square row-major matrix in
/// `vech` order. The upper triangle is ignored.
pub fn vech_lower(d: usize, entries: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(vech_len(d));
    for l in 0..d {
        for k in l..d {
            out.push(entries[k * d + l]);
        }
    }
    out
}

/// Symmetric matrix from its half-vectorization.
pub fn unvech(v: &[f64]) -> Result<CovMatrix> {
    let d = dim_from_vech_len(v.len())
        .ok_or_else(|| invalid_arg!("{} is not a triangular number", v.len()))?;
    let lower = unvech_lower(d, v);
    Ok(CovMatrix::from_lower(d, |k, l| lower[k * d + l]))
}

/// Lower-triangular row-major matrix whose `vech` is `v`.
pub fn unvech_lower(d: usize, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    let mut idx = 0;
    for l in 0..d {
        for k in l..d {
            out[k * d + l] = v[idx];
            idx += 1;
        }
    }
    out
}

/// Column labels `s_k_l` (1-based) in `vech` order.
pub fn vech_labels(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(vech_len(d));
    for l in 0..d {
        for k in l..d {
            out.push((k + 1, l + 1));
        }
    }
    out
}
