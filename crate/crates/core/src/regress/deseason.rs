use std::f64::consts::PI;

use chrono::NaiveDate;
use nalgebra::DMatrix;

use super::ols_matrix;
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Output of [`fourier_deseason`].
#[derive(Debug, Clone)]
pub struct Deseasonalized {
    pub residuals: TimeSeries,
    pub cos_coef: f64,
    pub sin_coef: f64,
    pub intercept: f64,
}

/// Calendar time in years since 1970-01-01.
pub fn years_since_epoch(date: NaiveDate) -> f64 {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch");
    (date - epoch).num_days() as f64 / 365.25
}

/// Returns `(residuals, cos, sin, intercept)` of the regression of `values`
/// on `cos(2π c t)`, `sin(2π c t)` and a constant.
pub fn fourier_deseason_values(
    t_years: &[f64],
    values: &[f64],
    cycles_per_year: f64,
) -> Result<(Vec<f64>, f64, f64, f64)> {
    if values.len() < 3 {
        return Err(Error::InsufficientData {
            needed: 3,
            got: values.len(),
        });
    }
    if t_years.len() != values.len() {
        return Err(Error::invalid("time index and values differ in length"));
    }
    let w = 2.0 * PI * cycles_per_year;
    let x = DMatrix::from_fn(values.len(), 3, |i, c| match c {
        0 => (w * t_years[i]).cos(),
        1 => (w * t_years[i]).sin(),
        _ => 1.0,
    });
    let fit = ols_matrix(values, x)?;
    let c = &fit.coefficients;
    Ok((fit.residuals.clone(), c[0], c[1], c[2]))
}

/// Removes an annual (or `cycles_per_year`) Fourier cycle plus mean from a
/// dated series.
pub fn fourier_deseason(ts: &TimeSeries, cycles_per_year: f64) -> Result<Deseasonalized> {
    let t: Vec<f64> = ts.timestamps().iter().map(|d| years_since_epoch(*d)).collect();
    let (res, cos_coef, sin_coef, intercept) = fourier_deseason_values(&t, ts.values(), cycles_per_year)?;
    let residuals = TimeSeries::with_frequency(
        format!("{}_deseason", ts.name()),
        ts.timestamps().to_vec(),
        res,
        ts.frequency(),
    )?;
    Ok(Deseasonalized {
        residuals,
        cos_coef,
        sin_coef,
        intercept,
    })
}
