use nalgebra::DMatrix;

use super::{critical_values, DeterministicSpec, LagChoice, TestKind, UnitRootResult};
use crate::error::{Error, Result};
use crate::regress::{bic_lag_select, ols_matrix};

/// The Dickey-Fuller test regression
/// `Δy_t = det_t + φ y_{t-1} + Σ_{i=1..p} ψ_i Δy_{t-i} + e_t`.
#[derive(Debug, Clone)]
pub struct AdfRegression {
    pub response: Vec<f64>,
    pub design: DMatrix<f64>,
    /// Column of `y_{t-1}` in the design.
    pub level_index: usize,
}

/// Builds the ADF regression with `lags` augmentation terms. The sample
/// starts as if `trim_lags >= lags` lags were used, so that regressions with
/// different lag orders share the same observations.
pub fn adf_regression(
    y: &[f64],
    spec: DeterministicSpec,
    lags: usize,
    trim_lags: usize,
) -> Result<AdfRegression> {
    let n = y.len();
    let start = lags.max(trim_lags) + 1;
    let k = spec.n_terms() + 1 + lags;
    if n < start + k + 1 {
        return Err(Error::InsufficientData {
            needed: start + k + 1,
            got: n,
        });
    }
    let rows = n - start;
    let det = spec.n_terms();
    let design = DMatrix::from_fn(rows, k, |r, c| {
        let t = start + r;
        if c < det {
            if c == 0 {
                1.0
            } else {
                t as f64
            }
        } else if c == det {
            y[t - 1]
        } else {
            let i = c - det;
            y[t - i] - y[t - i - 1]
        }
    });
    let response = (start..n).map(|t| y[t] - y[t - 1]).collect();
    Ok(AdfRegression {
        response,
        design,
        level_index: det,
    })
}

/// t-ratio of the lagged level in the ADF regression.
pub fn adf_statistic(y: &[f64], spec: DeterministicSpec, lags: usize) -> Result<f64> {
    if y.len() < lags + 12 {
        return Err(Error::InsufficientData {
            needed: lags + 12,
            got: y.len(),
        });
    }
    let reg = adf_regression(y, spec, lags, lags)?;
    let fit = ols_matrix(&reg.response, reg.design)?;
    Ok(fit.t_stats()[reg.level_index])
}

/// Augmented Dickey-Fuller test with left-tailed rejection.
pub fn adf(y: &[f64], spec: DeterministicSpec, lags: LagChoice) -> Result<UnitRootResult> {
    let lag = match lags {
        LagChoice::Fixed(p) => p,
        LagChoice::Bic { max_lag } => bic_lag_select(y, max_lag, spec)?,
    };
    let stat = adf_statistic(y, spec, lag)?;
    let cv = critical_values(TestKind::Adf, spec).expect("ADF table covers every spec");
    Ok(UnitRootResult::new(TestKind::Adf, stat, lag, spec, cv))
}
