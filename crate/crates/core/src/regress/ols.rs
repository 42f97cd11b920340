use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::least_squares;

/// Result of an ordinary least squares fit.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub fitted: Vec<f64>,
    /// Classical homoskedastic covariance `s^2 (X'X)^{-1}`.
    pub covariance: DMatrix<f64>,
    pub rss: f64,
    pub dof: usize,
    design: DMatrix<f64>,
    xtx_inv: DMatrix<f64>,
}

impl RegressionFit {
    /// The design actually used, including the intercept column if one was
    /// requested.
    pub fn design(&self) -> &DMatrix<f64> {
        &self.design
    }

    pub fn xtx_inv(&self) -> &DMatrix<f64> {
        &self.xtx_inv
    }

    pub fn n_obs(&self) -> usize {
        self.residuals.len()
    }

    pub fn sigma2(&self) -> f64 {
        self.rss / self.dof as f64
    }

    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.coefficients.len())
            .map(|i| self.covariance[(i, i)].max(0.0).sqrt())
            .collect()
    }

    pub fn t_stats(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .zip(self.std_errors())
            .map(|(b, se)| b / se)
            .collect()
    }
}

/// OLS of `y` on the columns of `x`, optionally with a leading intercept.
pub fn ols(y: &[f64], x: &DMatrix<f64>, intercept: bool) -> Result<RegressionFit> {
    let design = if intercept {
        x.clone().insert_column(0, 1.0)
    } else {
        x.clone()
    };
    ols_matrix(y, design)
}

/// OLS on a design that already contains every regressor.
pub fn ols_matrix(y: &[f64], design: DMatrix<f64>) -> Result<RegressionFit> {
    let (n, k) = design.shape();
    if n != y.len() {
        return Err(Error::invalid(format!(
            "response has {} observations, design has {n} rows",
            y.len()
        )));
    }
    if n <= k {
        return Err(Error::InsufficientData {
            needed: k + 1,
            got: n,
        });
    }
    let yv = DVector::from_column_slice(y);
    let ls = least_squares(&design, &yv)?;
    let dof = n - k;
    let s2 = ls.rss / dof as f64;
    let covariance = &ls.xtx_inv * s2;
    let fitted: Vec<f64> = y.iter().zip(ls.residuals.iter()).map(|(y, e)| y - e).collect();
    Ok(RegressionFit {
        coefficients: ls.coefficients.iter().copied().collect(),
        residuals: ls.residuals.iter().copied().collect(),
        fitted,
        covariance,
        rss: ls.rss,
        dof,
        design,
        xtx_inv: ls.xtx_inv,
    })
}
