//! Constant-coefficient regression: OLS with classical and Newey-West
//! covariance, BIC lag selection for ADF-type regressions, impulse indicator
//! saturation, Fourier deseasonalisation and the fuel switching price.

mod deseason;
mod hac;
mod iis;
mod lagselect;
mod ols;
mod switching;

pub use deseason::{fourier_deseason, fourier_deseason_values, years_since_epoch, Deseasonalized};
pub use hac::{newey_west, newey_west_auto_lag, white_covariance, HacLag, HacOptions, HacResult};
pub use iis::{iis_outliers, IisOptions, IisResult};
pub use lagselect::bic_lag_select;
pub use ols::{ols, ols_matrix, RegressionFit};
pub use switching::{switching_price, switching_price_value, SwitchingParams};

/// Two-sided p-value of a z statistic against the standard normal.
pub fn normal_p_value(z: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    let n = Normal::standard();
    2.0 * n.cdf(-z.abs())
}

/// `Φ^{-1}(1 - alpha/2)`.
pub fn normal_two_sided_critical(alpha: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::standard().inverse_cdf(1.0 - alpha / 2.0)
}
