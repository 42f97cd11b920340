use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    adf_statistic, critical_values, CriticalValues, DeterministicSpec, LagChoice, TestKind,
    UnitRootResult,
};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::quantile::quantiles;
use crate::regress::bic_lag_select;
use crate::rng::replicate_rng;

/// Smooth-transition trend under the alternative, with
/// `S_t = 1 / (1 + exp(-γ (t/n - τ)))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LnvModel {
    /// `α1 + α2 S_t`
    InterceptShift,
    /// `α1 + β1 t + α2 S_t`
    InterceptShiftWithTrend,
    /// `α1 + β1 t + (α2 + β2 t) S_t`
    TrendShift,
}

impl LnvModel {
    fn n_terms(self) -> usize {
        match self {
            LnvModel::InterceptShift => 2,
            LnvModel::InterceptShiftWithTrend => 3,
            LnvModel::TrendShift => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LnvOptions {
    pub model: LnvModel,
    /// Candidate midpoints as sample fractions.
    pub tau_grid: Vec<f64>,
    /// Candidate transition speeds (time measured as a sample fraction).
    pub gamma_grid: Vec<f64>,
    /// Lag order of the ADF regression on the detrended residuals.
    pub lags: LagChoice,
    /// Required for models without an embedded table.
    pub critical_values: Option<CriticalValues>,
}

impl Default for LnvOptions {
    fn default() -> Self {
        let tau_grid = (0..17).map(|i| 0.1 + 0.05 * i as f64).collect();
        let n_gamma = 13;
        let (lo, hi) = (0.5f64.ln(), 50f64.ln());
        let gamma_grid = (0..n_gamma)
            .map(|i| (lo + (hi - lo) * i as f64 / (n_gamma - 1) as f64).exp())
            .collect();
        LnvOptions {
            model: LnvModel::TrendShift,
            tau_grid,
            gamma_grid,
            lags: LagChoice::default(),
            critical_values: None,
        }
    }
}

/// Nonlinear least-squares fit of the smooth-transition trend.
#[derive(Debug, Clone)]
pub struct LnvFit {
    pub gamma: f64,
    pub tau: f64,
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub rss: f64,
}

fn transition_design(n: usize, model: LnvModel, gamma: f64, tau: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, model.n_terms(), |t, c| {
        let s = 1.0 / (1.0 + (-gamma * ((t + 1) as f64 / n as f64 - tau)).exp());
        let tt = (t + 1) as f64 / n as f64;
        match (model, c) {
            (_, 0) => 1.0,
            (LnvModel::InterceptShift, 1) => s,
            (_, 1) => tt,
            (_, 2) => s,
            _ => tt * s,
        }
    })
}

fn profile_rss(y: &DVector<f64>, model: LnvModel, gamma: f64, tau: f64) -> Option<(f64, Vec<f64>, Vec<f64>)> {
    let x = transition_design(y.len(), model, gamma, tau);
    let ls = least_squares(&x, y).ok()?;
    Some((
        ls.rss,
        ls.coefficients.iter().copied().collect(),
        ls.residuals.iter().copied().collect(),
    ))
}

/// Grid search over `(γ, τ)` with inner OLS, followed by a compass-search
/// polish in `(ln γ, τ)` inside the grid's bounding box.
pub fn lnv_fit(y: &[f64], opts: &LnvOptions) -> Result<LnvFit> {
    if opts.tau_grid.is_empty() || opts.gamma_grid.is_empty() {
        return Err(Error::invalid("LNV grid is empty"));
    }
    if opts
        .gamma_grid
        .iter()
        .any(|g| !(*g > 0.0) || !g.is_finite())
        || opts.tau_grid.iter().any(|t| !(0.0..=1.0).contains(t))
    {
        return Err(Error::invalid("LNV grid needs γ > 0 and τ in [0, 1]"));
    }
    let yv = DVector::from_column_slice(y);
    let model = opts.model;
    let mut best: Option<(f64, f64, f64)> = None;
    for &tau in &opts.tau_grid {
        for &gamma in &opts.gamma_grid {
            if let Some((rss, _, _)) = profile_rss(&yv, model, gamma, tau) {
                if best.is_none_or(|b| rss < b.0) {
                    best = Some((rss, gamma.ln(), tau));
                }
            }
        }
    }
    let (mut rss, mut lg, mut tau) =
        best.ok_or_else(|| Error::invalid("every LNV grid point gave a singular design"))?;

    let (lg_lo, lg_hi) = opts
        .gamma_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), g| (a.min(g.ln()), b.max(g.ln())));
    let (t_lo, t_hi) = opts
        .tau_grid
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    let mut step_lg = if opts.gamma_grid.len() > 1 {
        (lg_hi - lg_lo) / (opts.gamma_grid.len() - 1) as f64 / 2.0
    } else {
        0.0
    };
    let mut step_tau = if opts.tau_grid.len() > 1 {
        (t_hi - t_lo) / (opts.tau_grid.len() - 1) as f64 / 2.0
    } else {
        0.0
    };
    while step_lg > 1e-3 || step_tau > 1e-4 {
        let mut improved = false;
        for (dlg, dtau) in [(step_lg, 0.0), (-step_lg, 0.0), (0.0, step_tau), (0.0, -step_tau)] {
            if dlg == 0.0 && dtau == 0.0 {
                continue;
            }
            let (clg, ctau) = ((lg + dlg).clamp(lg_lo, lg_hi), (tau + dtau).clamp(t_lo, t_hi));
            if let Some((r, _, _)) = profile_rss(&yv, model, clg.exp(), ctau) {
                if r < rss {
                    (rss, lg, tau) = (r, clg, ctau);
                    improved = true;
                }
            }
        }
        if !improved {
            step_lg /= 2.0;
            step_tau /= 2.0;
        }
    }
    let gamma = lg.exp();
    let (rss, coefficients, residuals) =
        profile_rss(&yv, model, gamma, tau).expect("polished point was evaluated before");
    Ok(LnvFit {
        gamma,
        tau,
        coefficients,
        residuals,
        rss,
    })
}

/// Leybourne-Newbold-Vougas test: ADF regression without deterministic
/// terms on the residuals of a fitted smooth-transition trend.
pub fn lnv(y: &[f64], opts: &LnvOptions) -> Result<UnitRootResult> {
    if y.len() < 50 {
        return Err(Error::InsufficientData {
            needed: 50,
            got: y.len(),
        });
    }
    let cv = match (opts.critical_values, opts.model) {
        (Some(cv), _) => cv,
        (None, LnvModel::TrendShift) => {
            critical_values(TestKind::Lnv, DeterministicSpec::ConstantTrend).expect("embedded")
        }
        (None, m) => {
            return Err(Error::Config(format!(
                "no embedded LNV critical values for {m:?}; supply them or simulate with lnv_simulated_critical_values"
            )))
        }
    };
    let (stat, lag) = lnv_statistic(y, opts)?;
    Ok(UnitRootResult::new(
        TestKind::Lnv,
        stat,
        lag,
        DeterministicSpec::ConstantTrend,
        cv,
    ))
}

fn lnv_statistic(y: &[f64], opts: &LnvOptions) -> Result<(f64, usize)> {
    let fit = lnv_fit(y, opts)?;
    let lag = match opts.lags {
        LagChoice::Fixed(p) => p,
        LagChoice::Bic { max_lag } => {
            bic_lag_select(&fit.residuals, max_lag, DeterministicSpec::None)?
        }
    };
    let stat = adf_statistic(&fit.residuals, DeterministicSpec::None, lag)?;
    Ok((stat, lag))
}

/// Left-tail quantiles (10, 5, 1%) of the LNV statistic under a Gaussian
/// random walk of length `n`.
pub fn lnv_simulated_critical_values(
    opts: &LnvOptions,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<CriticalValues> {
    use rand::Rng;
    use rand_distr::StandardNormal;
    let stats = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(seed, r);
            let mut level = 0.0;
            let y: Vec<f64> = (0..n)
                .map(|_| {
                    level += rng.sample::<f64, _>(StandardNormal);
                    level
                })
                .collect();
            lnv_statistic(&y, opts).map(|s| s.0)
        })
        .collect::<Result<Vec<f64>>>()?;
    let q = quantiles(&stats, &[0.10, 0.05, 0.01]);
    Ok(CriticalValues::new([q[0], q[1], q[2]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_walk(seed: u64, r: u64, n: usize) -> Vec<f64> {
        let mut rng = replicate_rng(seed, r);
        let mut level = 0.0;
        (0..n)
            .map(|_| {
                level += rng.sample::<f64, _>(StandardNormal);
                level
            })
            .collect()
    }

    #[test]
    fn critical_value_lookup() {
        let y = random_walk(1, 0, 100);
        let r = lnv(&y, &LnvOptions::default()).unwrap();
        assert_eq!(r.critical_values.at(90), Some(-4.55));
    }

    #[test]
    fn recovers_transition_parameters() {
        let n = 300;
        let mut rng = replicate_rng(2, 0);
        let y: Vec<f64> = (1..=n)
            .map(|t| {
                let s = t as f64 / n as f64;
                let st = 1.0 / (1.0 + (-20.0 * (s - 0.6)).exp());
                1.0 + 2.0 * s + (5.0 - 1.0 * s) * st + 0.05 * rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        let fit = lnv_fit(&y, &LnvOptions::default()).unwrap();
        assert!((fit.tau - 0.6).abs() < 0.02, "tau {}", fit.tau);
        assert!((fit.gamma / 20.0 - 1.0).abs() < 0.3, "gamma {}", fit.gamma);
    }

    #[test]
    fn degenerate_grid_rejected() {
        let y = random_walk(3, 0, 60);
        let opts = LnvOptions {
            tau_grid: vec![],
            ..LnvOptions::default()
        };
        assert!(lnv(&y, &opts).is_err());
        let opts = LnvOptions {
            gamma_grid: vec![-1.0],
            ..LnvOptions::default()
        };
        assert!(lnv(&y, &opts).is_err());
    }

    #[test]
    fn variants_without_table_need_values() {
        let y = random_walk(4, 0, 60);
        let opts = LnvOptions {
            model: LnvModel::InterceptShift,
            ..LnvOptions::default()
        };
        assert!(matches!(lnv(&y, &opts), Err(Error::Config(_))));
        let opts = LnvOptions {
            critical_values: Some(CriticalValues::new([-4.0, -4.3, -4.9])),
            ..opts
        };
        assert!(lnv(&y, &opts).is_ok());
    }

    #[test]
    fn power_against_smooth_transition() {
        let n = 200;
        let rejections = (0..100u64)
            .filter(|&r| {
                let mut rng = replicate_rng(60, r);
                let y: Vec<f64> = (1..=n)
                    .map(|t| {
                        let s = t as f64 / n as f64;
                        let st = 1.0 / (1.0 + (-15.0 * (s - 0.5)).exp());
                        2.0 * s + (4.0 + 2.0 * s) * st + 0.5 * rng.sample::<f64, _>(StandardNormal)
                    })
                    .collect();
                lnv(&y, &LnvOptions::default()).unwrap().statistic < -4.83
            })
            .count();
        assert!(rejections >= 80, "{rejections}/100");
    }

    #[test]
    fn size_under_random_walk() {
        let rejections = (0..200u64)
            .filter(|&r| {
                let y = random_walk(61, r, 500);
                lnv(&y, &LnvOptions::default()).unwrap().rejects_at(95)
            })
            .count();
        let rate = rejections as f64 / 200.0;
        assert!((rate - 0.05).abs() <= 0.03, "rate {rate}");
    }
}
