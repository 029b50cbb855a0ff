//! Dense linear algebra for the small matrices used here (covariance
//! matrices of a handful of assets and VHAR designs with a few columns).
//!
//! Matrices are row-major `&[f64]` slices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid_arg, invalid_state, Result};
use crate::math::{fabs, sqrt};

/// Lower Cholesky factor `L` with `L Lᵀ = a`, or `None` if a pivot is not
/// strictly positive.
pub fn cholesky(d: usize, a: &[f64]) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), d * d);
    let mut l = vec![0.0; d * d];
    for j in 0..d {
        let mut diag = a[j * d + j];
        for p in 0..j {
            diag -= l[j * d + p] * l[j * d + p];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let ljj = sqrt(diag);
        l[j * d + j] = ljj;
        for i in (j + 1)..d {
            let mut s = a[i * d + j];
            for p in 0..j {
                s -= l[i * d + p] * l[j * d + p];
            }
            l[i * d + j] = s / ljj;
        }
    }
    Some(l)
}

/// `L Lᵀ` for a lower-triangular `l`.
pub fn lower_times_transpose(d: usize, l: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; d * d];
    for i in 0..d {
        for j in 0..=i {
            let mut s = 0.0;
            for p in 0..=j {
                s += l[i * d + p] * l[j * d + p];
            }
            out[i * d + j] = s;
            out[j * d + i] = s;
        }
    }
    out
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(d: usize, a: &[f64]) -> Vec<f64> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                off += m[i * d + j] * m[i * d + j];
            }
        }
        if off == 0.0 {
            break;
        }
        let scale: f64 = (0..d).map(|i| m[i * d + i] * m[i * d + i]).sum::<f64>() + off;
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = m[p * d + p];
                let aqq = m[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (fabs(theta) + sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..d {
                    let mkp = m[k * d + p];
                    let mkq = m[k * d + q];
                    m[k * d + p] = c * mkp - s * mkq;
                    m[k * d + q] = s * mkp + c * mkq;
                }
                for k in 0..d {
                    let mpk = m[p * d + k];
                    let mqk = m[q * d + k];
                    m[p * d + k] = c * mpk - s * mqk;
                    m[q * d + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..d).map(|i| m[i * d + i]).collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

/// Solution of a linear least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Ratio of the largest to the smallest `|R_jj|` of the QR factor.
    pub condition: f64,
}

/// Minimises `‖a x − y‖₂` by Householder QR.
///
/// `a` is `rows × cols`, row-major. A column whose `|R_jj|` falls below
/// `1e-10 · max |R_jj|` is treated as linearly dependent and the problem is
/// rejected as rank-deficient.
pub fn least_squares(rows: usize, cols: usize, a: &[f64], y: &[f64]) -> Result<LeastSquares> {
    if a.len() != rows * cols || y.len() != rows {
        return Err(invalid_arg!(
            "design is {} values for {rows}x{cols}, response has {} rows",
            a.len(),
            y.len()
        ));
    }
    if rows < cols {
        return Err(invalid_state!(
            "rank-deficient design: {rows} rows for {cols} unknowns"
        ));
    }
    // Column-major working copy.
    let mut r = vec![0.0; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            r[j * rows + i] = a[i * cols + j];
        }
    }
    let mut qty = y.to_vec();
    let mut diag = vec![0.0; cols];

    for j in 0..cols {
        let col = &mut r[j * rows..(j + 1) * rows];
        let norm = sqrt(col[j..].iter().map(|v| v * v).sum::<f64>());
        if norm == 0.0 {
            diag[j] = 0.0;
            continue;
        }
        let alpha = if col[j] > 0.0 { -norm } else { norm };
        // v = x - alpha e_j, stored in place.
        col[j] -= alpha;
        let vnorm2: f64 = col[j..].iter().map(|v| v * v).sum();
        let v: Vec<f64> = col[j..].to_vec();
        diag[j] = alpha;
        for k in (j + 1)..cols {
            let ck = &mut r[k * rows..(k + 1) * rows];
            let dot: f64 = v.iter().zip(&ck[j..]).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in ck[j..].iter_mut().zip(&v) {
                *c -= f * vi;
            }
        }
        let dot: f64 = v.iter().zip(&qty[j..]).map(|(a, b)| a * b).sum();
        let f = 2.0 * dot / vnorm2;
        for (c, vi) in qty[j..].iter_mut().zip(&v) {
            *c -= f * vi;
        }
    }

    let max_diag = diag.iter().fold(0.0f64, |m, v| m.max(fabs(*v)));
    let min_diag = diag.iter().fold(f64::INFINITY, |m, v| m.min(fabs(*v)));
    let condition = if min_diag > 0.0 {
        max_diag / min_diag
    } else {
        f64::INFINITY
    };
    if !(max_diag > 0.0) || min_diag <= 1e-10 * max_diag {
        return Err(invalid_state!(
            "rank-deficient design: |R_jj| ratio {condition:e} exceeds 1e10"
        ));
    }

    // Back substitution on the upper triangle.
    let mut x = vec![0.0; cols];
    for j in (0..cols).rev() {
        let mut s = qty[j];
        for k in (j + 1)..cols {
            s -= r[k * rows + j] * x[k];
        }
        x[j] = s / diag[j];
    }
    let residuals = (0..rows)
        .map(|i| {
            let fit: f64 = (0..cols).map(|j| a[i * cols + j] * x[j]).sum();
            y[i] - fit
        })
        .collect();
    Ok(LeastSquares {
        coefficients: x,
        residuals,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_of_diagonal() {
        let l = cholesky(2, &[4.0, 0.0, 0.0, 9.0]).unwrap();
        assert_eq!(l, vec![2.0, 0.0, 0.0, 3.0]);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        assert!(cholesky(2, &[1.0, 2.0, 2.0, 1.0]).is_none());
        assert!(cholesky(2, &[0.0, 0.0, 0.0, 1.0]).is_none());
    }

    #[test]
    fn cholesky_roundtrip() {
        let a = [4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0];
        let l = cholesky(3, &a).unwrap();
        let back = lower_times_transpose(3, &l);
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_eigenvalues() {
        let eig = symmetric_eigenvalues(2, &[2.0, 1.0, 1.0, 2.0]);
        assert!((eig[0] - 1.0).abs() < 1e-14);
        assert!((eig[1] - 3.0).abs() < 1e-14);
        let eig = symmetric_eigenvalues(3, &[1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 0.0, 0.0, 5.0]);
        assert_eq!(eig, vec![-2.0, 1.0, 5.0]);
    }

    #[test]
    fn least_squares_exact_fit() {
        // y = 1 + 2 x
        let a = [1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let sol = least_squares(4, 2, &a, &y).unwrap();
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-13);
        assert!((sol.coefficients[1] - 2.0).abs() < 1e-13);
        assert!(sol.residuals.iter().all(|r| r.abs() < 1e-13));
    }

    #[test]
    fn least_squares_detects_collinearity() {
        let a = [1.0, 2.0, 1.0, 2.0, 1.0, 2.0];
        let y = [1.0, 2.0, 3.0];
        assert!(matches!(
            least_squares(3, 2, &a, &y),
            Err(crate::Error::InvalidState(_))
        ));
    }
}
