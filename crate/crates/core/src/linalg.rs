//! Dense least-squares helpers shared by the regression-based modules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative size below which a Householder pivot is treated as zero.
const RANK_TOL: f64 = 1e-9;

/// Least-squares solution of `y = X b + e` computed from a QR factorisation.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: DVector<f64>,
    pub residuals: DVector<f64>,
    pub rss: f64,
    /// `(X'X)^{-1}`.
    pub xtx_inv: DMatrix<f64>,
}

pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<LeastSquares> {
    let (n, k) = x.shape();
    if y.len() != n {
        return Err(Error::invalid(format!(
            "response has {} rows but design has {n}",
            y.len()
        )));
    }
    if n < k {
        return Err(Error::InsufficientData { needed: k, got: n });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..k {
        let norm = x.column(j).norm();
        if norm == 0.0 || r[(j, j)].abs() <= RANK_TOL * norm {
            return Err(Error::SingularDesign(format!(
                "column {j} is (numerically) a linear combination of earlier columns"
            )));
        }
    }
    let qty = qr.q().transpose() * y;
    let coefficients = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::SingularDesign("triangular solve failed".into()))?;
    let residuals = y - x * &coefficients;
    let rss = residuals.norm_squared();
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::SingularDesign("triangular inverse failed".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();
    Ok(LeastSquares {
        coefficients,
        residuals,
        rss,
        xtx_inv,
    })
}

/// Solves the small symmetric positive definite system `a x = b` in place by
/// Cholesky. `a` is row-major `p x p`; on success `b` holds the solution and
/// `a` holds the factor. Returns `false` when a pivot is not positive
/// relative to the matching diagonal entry.
pub(crate) fn cholesky_solve(a: &mut [f64], b: &mut [f64], p: usize) -> bool {
    for j in 0..p {
        let diag0 = a[j * p + j];
        let mut d = diag0;
        for k in 0..j {
            d -= a[j * p + k] * a[j * p + k];
        }
        if !(d > diag0.abs() * 1e-13) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * p + j] = d;
        for i in (j + 1)..p {
            let mut s = a[i * p + j];
            for k in 0..j {
                s -= a[i * p + k] * a[j * p + k];
            }
            a[i * p + j] = s / d;
        }
    }
    for i in 0..p {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * p + k] * b[k];
        }
        b[i] = s / a[i * p + i];
    }
    for i in (0..p).rev() {
        let mut s = b[i];
        for k in (i + 1)..p {
            s -= a[k * p + i] * b[k];
        }
        b[i] = s / a[i * p + i];
    }
    true
}

/// Diagonal entry `i` of `A^{-1}` given the Cholesky factor left in `a` by
/// [`cholesky_solve`].
pub(crate) fn cholesky_inverse_diag(factor: &[f64], p: usize, i: usize) -> f64 {
    // Solve A z = e_i with the stored factor; z_i is the entry.
    let mut e = vec![0.0; p];
    e[i] = 1.0;
    for r in 0..p {
        let mut s = e[r];
        for k in 0..r {
            s -= factor[r * p + k] * e[k];
        }
        e[r] = s / factor[r * p + r];
    }
    for r in (0..p).rev() {
        let mut s = e[r];
        for k in (r + 1)..p {
            s -= factor[k * p + r] * e[k];
        }
        e[r] = s / factor[r * p + r];
    }
    e[i]
}
