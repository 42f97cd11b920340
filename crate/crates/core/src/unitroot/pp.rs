use super::{adf_regression, critical_values, Bandwidth, DeterministicSpec, TestKind, UnitRootResult};
use crate::error::{Error, Result};
use crate::regress::ols_matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PpOptions {
    pub bandwidth: Bandwidth,
}

/// Bartlett-weighted long-run variance `γ_0 + 2 Σ_j (1 - j/(l+1)) γ_j` of a
/// residual series, with autocovariances divided by `n`.
pub(crate) fn long_run_variance(e: &[f64], lag: usize) -> f64 {
    let n = e.len() as f64;
    let gamma = |j: usize| e[j..].iter().zip(e).map(|(a, b)| a * b).sum::<f64>() / n;
    let mut s = gamma(0);
    for j in 1..=lag.min(e.len() - 1) {
        s += 2.0 * (1.0 - j as f64 / (lag as f64 + 1.0)) * gamma(j);
    }
    s
}

pub fn pp(y: &[f64], spec: DeterministicSpec) -> Result<UnitRootResult> {
    pp_with(y, spec, PpOptions::default())
}

/// Phillips-Perron `Z_τ`: the lag-0 Dickey-Fuller t-ratio corrected with a
/// Bartlett long-run variance of the regression residuals.
pub fn pp_with(y: &[f64], spec: DeterministicSpec, opts: PpOptions) -> Result<UnitRootResult> {
    if y.len() < 25 {
        return Err(Error::InsufficientData {
            needed: 25,
            got: y.len(),
        });
    }
    let reg = adf_regression(y, spec, 0, 0)?;
    let idx = reg.level_index;
    let fit = ols_matrix(&reg.response, reg.design)?;
    let n = fit.n_obs();
    let lag = opts.bandwidth.resolve(n);
    let t_stat = fit.t_stats()[idx];
    let se = fit.std_errors()[idx];
    let s = fit.sigma2().sqrt();
    let gamma0 = fit.rss / n as f64;
    let lambda2 = long_run_variance(&fit.residuals, lag);
    if !(lambda2 > 0.0) {
        return Err(Error::Domain {
            index: 0,
            message: "non-positive long-run variance".into(),
        });
    }
    let lambda = lambda2.sqrt();
    let z = (gamma0 / lambda2).sqrt() * t_stat
        - (lambda2 - gamma0) / (2.0 * lambda) * (n as f64 * se / s);
    let cv = critical_values(TestKind::Pp, spec).expect("PP table covers every spec");
    Ok(UnitRootResult::new(TestKind::Pp, z, lag, spec, cv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{master_rng, replicate_rng};
    use crate::unitroot::adf_statistic;
    use rand::Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn zero_bandwidth_reduces_to_adf() {
        let mut rng = master_rng(9);
        let y: Vec<f64> = (0..80).map(|_| rng.sample(StandardNormal)).collect();
        for spec in [
            DeterministicSpec::None,
            DeterministicSpec::Constant,
            DeterministicSpec::ConstantTrend,
        ] {
            let z = pp_with(&y, spec, PpOptions { bandwidth: Bandwidth::Fixed(0) })
                .unwrap()
                .statistic;
            let t = adf_statistic(&y, spec, 0).unwrap();
            assert!((z - t).abs() < 1e-8);
        }
    }

    #[test]
    fn shares_adf_trend_critical_values() {
        let y: Vec<f64> = (0..30).map(|t| ((t * 31) % 7) as f64).collect();
        let r = pp(&y, DeterministicSpec::ConstantTrend).unwrap();
        assert_eq!(r.critical_values.values, [-3.13, -3.42, -3.98]);
    }

    #[test]
    fn too_short() {
        assert!(pp(&[1.0; 24], DeterministicSpec::Constant).is_err());
    }

    #[test]
    fn size_under_random_walk() {
        let reps = 2000u64;
        let rejections = (0..reps)
            .filter(|&r| {
                let mut rng = replicate_rng(404, r);
                let mut level = 0.0;
                let y: Vec<f64> = (0..500)
                    .map(|_| {
                        level += rng.sample::<f64, _>(StandardNormal);
                        level
                    })
                    .collect();
                pp(&y, DeterministicSpec::ConstantTrend).unwrap().rejects_at(95)
            })
            .count();
        let rate = rejections as f64 / reps as f64;
        assert!((rate - 0.05).abs() <= 0.025, "rate {rate}");
    }
}
