//! Time-varying coefficient regression `y_t = x_t' β(t/n) + z_t`.
//!
//! Coefficients are estimated by local-linear kernel weighted least squares
//! in rescaled time, with pointwise bands from the autoregressive wild
//! bootstrap and data-driven bandwidth choice.

mod awb;
mod bandwidth;
mod smoother;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use awb::{awb_bands, awb_bands_multi, default_gamma, AwbConfig, BandSet};
pub use bandwidth::{bandwidth_criterion, select_bandwidth, BandwidthChoice, BandwidthMethod};
pub use smoother::LocalSmoother;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    #[default]
    Epanechnikov,
}

impl Kernel {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Kernel::Epanechnikov => epanechnikov(x),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Epanechnikov => "epanechnikov",
        }
    }
}

/// `K(x) = 3/4 (1 - x^2)` on `[-1, 1]`, zero outside.
///
/// ```
/// use exuberance::tvc::epanechnikov;
/// assert_eq!(epanechnikov(0.0), 0.75);
/// assert_eq!(epanechnikov(0.5), 0.5625);
/// assert_eq!(epanechnikov(1.0), 0.0);
/// ```
pub fn epanechnikov(x: f64) -> f64 {
    if x.abs() <= 1.0 {
        0.75 * (1.0 - x * x)
    } else {
        0.0
    }
}

/// Pilot bandwidth `0.5 h^{5/9}` for the residual-generating fit.
pub fn oversmooth_bandwidth(h: f64) -> Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::invalid(format!("bandwidth {h} outside (0, 1)")));
    }
    Ok(0.5 * h.powf(5.0 / 9.0))
}

/// The sample points `t/n`, `t = 1..=n`.
pub fn sample_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|t| t as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCurves {
    pub grid: Vec<f64>,
    /// `grid x k` matrix of `β_j(τ)`.
    pub estimates: DMatrix<f64>,
    /// `grid x k` matrix of `β_j'(τ)`.
    pub derivatives: DMatrix<f64>,
    pub bandwidth: f64,
    pub kernel: Kernel,
    /// Grid points within one bandwidth of either end of the sample.
    pub boundary: Vec<bool>,
}

impl CoefficientCurves {
    pub fn n_coefficients(&self) -> usize {
        self.estimates.ncols()
    }

    pub fn coefficient(&self, j: usize) -> Vec<f64> {
        self.estimates.column(j).iter().copied().collect()
    }
}

/// Local-linear estimates of the coefficient curves on `grid`.
///
/// At each `τ` the weighted least squares problem with regressors
/// `(x_t, x_t (t/n - τ))` and weights `K((t/n - τ)/h)` is solved; the first
/// block of the solution estimates `β(τ)`, the second its derivative.
///
/// ```
/// use exuberance::tvc::{local_linear_fit, sample_grid, Kernel};
/// use nalgebra::DMatrix;
///
/// let n = 100;
/// let x = DMatrix::from_fn(n, 1, |t, _| 1.0 + (t as f64 * 0.7).sin());
/// let y: Vec<f64> = (0..n).map(|t| 2.0 * x[(t, 0)]).collect();
/// let fit = local_linear_fit(&y, &x, 0.2, Kernel::Epanechnikov, &sample_grid(n)).unwrap();
/// assert!((fit.estimates[(50, 0)] - 2.0).abs() < 1e-8);
/// ```
pub fn local_linear_fit(
    y: &[f64],
    x: &DMatrix<f64>,
    h: f64,
    kernel: Kernel,
    grid: &[f64],
) -> Result<CoefficientCurves> {
    let s = LocalSmoother::new(x, h, kernel, grid)?;
    if y.len() != x.nrows() {
        return Err(Error::invalid("response and regressors differ in length"));
    }
    Ok(s.curves(y))
}

/// Fitted values `x_t' β(t/n)` from estimates on the sample grid.
pub fn fitted_values(x: &DMatrix<f64>, estimates: &DMatrix<f64>) -> Vec<f64> {
    (0..x.nrows()).map(|t| x.row(t).dot(&estimates.row(t))).collect()
}

/// A maximal run of grid points where a band excludes zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignificantPeriod {
    /// First grid index.
    pub start: usize,
    /// Last grid index.
    pub end: usize,
    /// `true` when the band lies above zero.
    pub positive: bool,
}

/// Per coefficient, the maximal grid intervals on which `0` lies outside
/// `[lower, upper]`.
pub fn significance_periods(
    curves: &CoefficientCurves,
    bands: &BandSet,
) -> Result<Vec<Vec<SignificantPeriod>>> {
    let k = curves.n_coefficients();
    if bands.lower.len() != k || bands.lower.iter().any(|b| b.len() != curves.grid.len()) {
        return Err(Error::invalid("bands and curves are not aligned"));
    }
    Ok((0..k)
        .map(|j| {
            let sign = |i: usize| {
                if bands.lower[j][i] > 0.0 {
                    Some(true)
                } else if bands.upper[j][i] < 0.0 {
                    Some(false)
                } else {
                    None
                }
            };
            let mut out: Vec<SignificantPeriod> = Vec::new();
            for i in 0..curves.grid.len() {
                match (sign(i), out.last_mut()) {
                    (Some(s), Some(p)) if p.end + 1 == i && p.positive == s => p.end = i,
                    (Some(s), _) => out.push(SignificantPeriod {
                        start: i,
                        end: i,
                        positive: s,
                    }),
                    (None, _) => {}
                }
            }
            out
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regress::ols_matrix;
    use crate::rng::master_rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn kernel_values_and_mass() {
        assert_eq!(epanechnikov(0.0), 0.75);
        assert_eq!(epanechnikov(1.0), 0.0);
        assert_eq!(epanechnikov(-1.0), 0.0);
        assert_eq!(epanechnikov(0.5), 0.5625);
        assert_eq!(epanechnikov(1.5), 0.0);
        let m = 200_000;
        let dx = 2.0 / m as f64;
        let mass: f64 = (0..m).map(|i| epanechnikov(-1.0 + (i as f64 + 0.5) * dx) * dx).sum();
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn oversmoothing_rule() {
        // 0.5 * 0.09^{5/9} = 0.131218...
        assert!((oversmooth_bandwidth(0.09).unwrap() - 0.131218).abs() < 5e-7);
        let tiny = oversmooth_bandwidth(1e-6).unwrap();
        assert!((tiny - 0.5 * 1e-6f64.powf(5.0 / 9.0)).abs() < 1e-15 && tiny > 1e-6);
        // 0.5 h^{5/9} = h at h = 0.5^{9/4}
        let fixed = 0.5f64.powf(9.0 / 4.0);
        for h in [0.01, 0.1, 0.2] {
            assert!(oversmooth_bandwidth(h).unwrap() > h);
        }
        assert!((oversmooth_bandwidth(fixed).unwrap() - fixed).abs() < 1e-12);
        assert!(oversmooth_bandwidth(0.3).unwrap() < 0.3);
        assert!(oversmooth_bandwidth(0.0).is_err() && oversmooth_bandwidth(1.0).is_err());
    }

    fn design(seed: u64, n: usize) -> DMatrix<f64> {
        let mut rng = master_rng(seed);
        DMatrix::from_fn(n, 2, |_, c| if c == 0 { 1.0 } else { rng.sample(StandardNormal) })
    }

    #[test]
    fn reproduces_constant_and_linear_paths() {
        let n = 200;
        let x = design(1, n);
        let grid = sample_grid(n);
        let y: Vec<f64> = (0..n).map(|t| 2.0 * x[(t, 0)] + 2.0 * x[(t, 1)]).collect();
        let fit = local_linear_fit(&y, &x, 0.1, Kernel::Epanechnikov, &grid).unwrap();
        let y2: Vec<f64> = (0..n).map(|t| grid[t] * x[(t, 1)] - 0.5 * x[(t, 0)]).collect();
        let fit2 = local_linear_fit(&y2, &x, 0.1, Kernel::Epanechnikov, &grid).unwrap();
        for i in 20..180 {
            for j in 0..2 {
                assert!((fit.estimates[(i, j)] - 2.0).abs() <= 1e-8);
                assert!(fit.derivatives[(i, j)].abs() <= 1e-8);
            }
            assert!((fit2.estimates[(i, 1)] - grid[i]).abs() <= 1e-8);
            assert!((fit2.derivatives[(i, 1)] - 1.0).abs() <= 1e-8);
            assert!((fit2.estimates[(i, 0)] + 0.5).abs() <= 1e-8);
        }
        assert!(fit.boundary[0] && fit.boundary[199] && !fit.boundary[100]);
    }

    #[test]
    fn matches_brute_force_weighted_least_squares() {
        let n = 30;
        let x = design(2, n);
        let mut rng = master_rng(3);
        let y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let (tau, h) = (0.5, 0.3);
        let fit = local_linear_fit(&y, &x, h, Kernel::Epanechnikov, &[tau]).unwrap();
        // Oracle: OLS on sqrt(w)-scaled rows of (x, x (t/n - tau)).
        let rows: Vec<usize> = (0..n)
            .filter(|t| epanechnikov(((*t + 1) as f64 / n as f64 - tau) / h) > 0.0)
            .collect();
        let z = DMatrix::from_fn(rows.len(), 4, |r, c| {
            let t = rows[r];
            let u = (t + 1) as f64 / n as f64 - tau;
            let w = epanechnikov(u / h).sqrt();
            w * if c < 2 { x[(t, c)] } else { x[(t, c - 2)] * u }
        });
        let yw: Vec<f64> = rows
            .iter()
            .map(|&t| epanechnikov(((t + 1) as f64 / n as f64 - tau) / h).sqrt() * y[t])
            .collect();
        let theta = ols_matrix(&yw, z).unwrap().coefficients;
        for j in 0..2 {
            assert!((fit.estimates[(0, j)] - theta[j]).abs() <= 1e-8);
            assert!((fit.derivatives[(0, j)] - theta[2 + j]).abs() <= 1e-8);
        }
    }

    #[test]
    fn singular_local_design_names_tau() {
        let n = 100;
        let x = DMatrix::from_fn(n, 2, |t, c| if c == 0 { 1.0 } else if t < 50 { 0.0 } else { 1.0 });
        let y = vec![1.0; n];
        let err = local_linear_fit(&y, &x, 0.1, Kernel::Epanechnikov, &[0.2]).unwrap_err();
        assert!(err.to_string().contains("0.2"), "{err}");
    }

    #[test]
    fn bandwidth_too_small_for_regressors() {
        let x = design(4, 20);
        let y = vec![0.0; 20];
        assert!(local_linear_fit(&y, &x, 0.3, Kernel::Epanechnikov, &[0.5]).is_err());
    }

    #[test]
    fn wide_bandwidth_approaches_global_fit() {
        let n = 150;
        let x = design(5, n);
        let mut rng = master_rng(6);
        let y: Vec<f64> = (0..n)
            .map(|t| 1.0 + 0.5 * x[(t, 1)] + 0.3 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let ols = ols_matrix(&y, x.clone()).unwrap().coefficients;
        let grid: Vec<f64> = (30..=120).map(|t| t as f64 / n as f64).collect();
        // As h grows the kernel weights flatten, so the fit tends to an
        // unweighted regression on (x, x (t/n - tau)).
        let limit: Vec<[f64; 2]> = grid
            .iter()
            .map(|&tau| {
                let z = DMatrix::from_fn(n, 4, |t, c| {
                    let u = (t + 1) as f64 / n as f64 - tau;
                    if c < 2 { x[(t, c)] } else { x[(t, c - 2)] * u }
                });
                let b = ols_matrix(&y, z).unwrap().coefficients;
                [b[0], b[1]]
            })
            .collect();
        let mut gaps = Vec::new();
        for h in [0.5, 1.0, 2.0, 8.0] {
            let fit = local_linear_fit(&y, &x, h, Kernel::Epanechnikov, &grid).unwrap();
            let mut gap = 0.0f64;
            for (i, l) in limit.iter().enumerate() {
                for j in 0..2 {
                    gap = gap.max((fit.estimates[(i, j)] - l[j]).abs());
                    assert!((fit.estimates[(i, j)] - ols[j]).abs() < 0.1);
                }
            }
            gaps.push(gap);
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
        assert!(gaps[3] < 1e-3, "{gaps:?}");
    }

    fn bands(lower: Vec<f64>, upper: Vec<f64>) -> BandSet {
        BandSet {
            level: 95.0,
            reps: 199,
            gamma: 0.5,
            h_tilde: 0.2,
            lower: vec![lower],
            upper: vec![upper],
        }
    }

    fn curves(n: usize) -> CoefficientCurves {
        CoefficientCurves {
            grid: sample_grid(n),
            estimates: DMatrix::zeros(n, 1),
            derivatives: DMatrix::zeros(n, 1),
            bandwidth: 0.1,
            kernel: Kernel::Epanechnikov,
            boundary: vec![false; n],
        }
    }

    #[test]
    fn significance_all_none_and_run() {
        let c = curves(40);
        let all = significance_periods(&c, &bands(vec![0.1; 40], vec![1.0; 40])).unwrap();
        assert_eq!(all[0], vec![SignificantPeriod { start: 0, end: 39, positive: true }]);
        let none = significance_periods(&c, &bands(vec![-1.0; 40], vec![1.0; 40])).unwrap();
        assert!(none[0].is_empty());
        let lower: Vec<f64> = (0..40).map(|i| if (10..=20).contains(&i) { 0.2 } else { -0.2 }).collect();
        let run = significance_periods(&c, &bands(lower.clone(), vec![1.0; 40])).unwrap();
        let oracle: Vec<usize> = (0..40).filter(|&i| lower[i] > 0.0).collect();
        assert_eq!(run[0].len(), 1);
        assert_eq!((run[0][0].start, run[0][0].end), (oracle[0], *oracle.last().unwrap()));
        assert_eq!((run[0][0].start, run[0][0].end), (10, 20));
    }
}
