use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fitted_values, oversmooth_bandwidth, sample_grid, Kernel, LocalSmoother};
use crate::error::{Error, Result};
use crate::quantile::quantile_sorted;
use crate::rng::replicate_rng;

/// Fewest bootstrap replications accepted.
pub const MIN_AWB_REPS: usize = 199;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AwbConfig {
    /// AR parameter of the multiplier chain; `None` uses [`default_gamma`].
    pub gamma: Option<f64>,
    pub reps: usize,
    /// Pilot bandwidth; `None` uses `0.5 h^{5/9}`.
    pub h_tilde: Option<f64>,
    pub seed: u64,
    pub kernel: Kernel,
}

impl Default for AwbConfig {
    fn default() -> Self {
        AwbConfig {
            gamma: None,
            reps: 999,
            h_tilde: None,
            seed: 1,
            kernel: Kernel::Epanechnikov,
        }
    }
}

/// `γ = 0.01^{1/l}` with block length `l = ceil(1.75 n^{1/3})`.
pub fn default_gamma(n: usize) -> f64 {
    let l = (1.75 * (n as f64).cbrt()).ceil();
    0.01f64.powf(1.0 / l)
}

/// Pointwise bootstrap bands on the estimation grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandSet {
    /// Confidence level in percent.
    pub level: f64,
    pub reps: usize,
    pub gamma: f64,
    pub h_tilde: f64,
    /// Per coefficient, the lower band on the grid.
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
}

pub fn awb_bands(
    y: &[f64],
    x: &DMatrix<f64>,
    h: f64,
    grid: &[f64],
    config: &AwbConfig,
    level: f64,
) -> Result<BandSet> {
    awb_bands_multi(y, x, h, grid, config, &[level]).map(|mut v| v.remove(0))
}

/// Autoregressive wild bootstrap bands at several levels from one set of
/// replicates.
///
/// Residuals come from a pilot fit at `h̃`. Each replicate multiplies them
/// by a stationary Gaussian AR(1) chain with parameter `γ`, adds them back
/// to the pilot fit and re-estimates at `h`. With `q_p` the `p`-quantile of
/// `β*(τ) - β̃(τ)`, the band is `[β̂(τ) - q_{1-a/2}, β̂(τ) - q_{a/2}]`.
pub fn awb_bands_multi(
    y: &[f64],
    x: &DMatrix<f64>,
    h: f64,
    grid: &[f64],
    config: &AwbConfig,
    levels: &[f64],
) -> Result<Vec<BandSet>> {
    let n = y.len();
    if x.nrows() != n {
        return Err(Error::invalid("response and regressors differ in length"));
    }
    if config.reps < MIN_AWB_REPS {
        return Err(Error::invalid(format!(
            "{} bootstrap replications requested, at least {MIN_AWB_REPS} needed",
            config.reps
        )));
    }
    if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0 && *l < 100.0)) {
        return Err(Error::invalid("band levels must lie in (0, 100)"));
    }
    let gamma = config.gamma.unwrap_or_else(|| default_gamma(n));
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::invalid(format!("AWB gamma {gamma} outside (0, 1)")));
    }
    let h_tilde = match config.h_tilde {
        Some(v) => v,
        None => oversmooth_bandwidth(h)?,
    };

    let samples = sample_grid(n);
    let pilot = LocalSmoother::new(x, h_tilde, config.kernel, &samples)?;
    let pilot_at_samples = pilot.estimates(y);
    let y_tilde = fitted_values(x, &pilot_at_samples);
    let z_hat: Vec<f64> = y.iter().zip(&y_tilde).map(|(a, b)| a - b).collect();
    let beta_tilde = if grid == samples.as_slice() {
        pilot_at_samples
    } else {
        LocalSmoother::new(x, h_tilde, config.kernel, grid)?.estimates(y)
    };
    let main = LocalSmoother::new(x, h, config.kernel, grid)?;
    let beta_hat = main.estimates(y);

    let (g, k) = beta_hat.shape();
    let innovation = Normal::new(0.0, (1.0 - gamma * gamma).sqrt())
        .map_err(|e| Error::invalid(e.to_string()))?;
    let draws: Vec<DMatrix<f64>> = (0..config.reps as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = replicate_rng(config.seed, b);
            let mut xi: f64 = rng.sample(StandardNormal);
            let y_star: Vec<f64> = (0..n)
                .map(|t| {
                    if t > 0 {
                        xi = gamma * xi + innovation.sample(&mut rng);
                    }
                    y_tilde[t] + xi * z_hat[t]
                })
                .collect();
            let mut est = DMatrix::zeros(g, k);
            main.estimates_into(&y_star, &mut est);
            est - &beta_tilde
        })
        .collect();

    let mut sets: Vec<BandSet> = levels
        .iter()
        .map(|&level| BandSet {
            level,
            reps: config.reps,
            gamma,
            h_tilde,
            lower: vec![vec![0.0; g]; k],
            upper: vec![vec![0.0; g]; k],
        })
        .collect();
    let mut column = vec![0.0; config.reps];
    for j in 0..k {
        for i in 0..g {
            for (c, d) in column.iter_mut().zip(&draws) {
                *c = d[(i, j)];
            }
            column.sort_by(f64::total_cmp);
            for set in &mut sets {
                let a = 1.0 - set.level / 100.0;
                let q_hi = quantile_sorted(&column, 1.0 - a / 2.0);
                let q_lo = quantile_sorted(&column, a / 2.0);
                set.lower[j][i] = beta_hat[(i, j)] - q_hi;
                set.upper[j][i] = beta_hat[(i, j)] - q_lo;
            }
        }
    }
    Ok(sets)
}
