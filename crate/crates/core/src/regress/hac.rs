use nalgebra::DMatrix;

use super::{normal_p_value, RegressionFit};
use crate::error::{Error, Result};

/// Truncation lag for the Bartlett kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HacLag {
    #[default]
    Automatic,
    Fixed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HacOptions {
    pub lag: HacLag,
}

impl HacOptions {
    pub fn fixed(lag: usize) -> Self {
        HacOptions {
            lag: HacLag::Fixed(lag),
        }
    }
}

/// Heteroskedasticity and autocorrelation consistent inference.
#[derive(Debug, Clone)]
pub struct HacResult {
    pub covariance: DMatrix<f64>,
    pub std_errors: Vec<f64>,
    /// Two-sided, against the standard normal.
    pub p_values: Vec<f64>,
    pub lag: usize,
}

/// `floor(4 (n/100)^{2/9})`.
pub fn newey_west_auto_lag(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Newey-West covariance of the OLS coefficients with Bartlett weights
/// `1 - l/(L+1)`. With `L = 0` this is the White (HC0) covariance.
pub fn newey_west(fit: &RegressionFit, opts: HacOptions) -> Result<HacResult> {
    let x = fit.design();
    let (n, k) = x.shape();
    let lag = match opts.lag {
        HacLag::Automatic => newey_west_auto_lag(n),
        HacLag::Fixed(l) => l,
    };
    if lag >= n {
        return Err(Error::invalid(format!(
            "HAC truncation lag {lag} must be below the sample size {n}"
        )));
    }
    // Scores u_t = x_t e_t, one row per observation.
    let mut u = x.clone();
    for (t, e) in fit.residuals.iter().enumerate() {
        u.row_mut(t).scale_mut(*e);
    }
    let mut meat = u.transpose() * &u;
    for l in 1..=lag {
        let w = 1.0 - l as f64 / (lag as f64 + 1.0);
        let lead = u.rows(l, n - l);
        let lagged = u.rows(0, n - l);
        let gamma = lead.transpose() * lagged;
        meat += (&gamma + gamma.transpose()) * w;
    }
    let bread = fit.xtx_inv();
    let mut covariance = bread * meat * bread;
    for i in 0..k {
        for j in (i + 1)..k {
            let s = 0.5 * (covariance[(i, j)] + covariance[(j, i)]);
            covariance[(i, j)] = s;
            covariance[(j, i)] = s;
        }
    }
    let std_errors: Vec<f64> = (0..k).map(|i| covariance[(i, i)].max(0.0).sqrt()).collect();
    let p_values = fit
        .coefficients
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| normal_p_value(b / se))
        .collect();
    Ok(HacResult {
        covariance,
        std_errors,
        p_values,
        lag,
    })
}

/// White heteroskedasticity-robust covariance.
pub fn white_covariance(fit: &RegressionFit) -> DMatrix<f64> {
    newey_west(fit, HacOptions::fixed(0))
        .expect("lag 0 is always admissible")
        .covariance
}
