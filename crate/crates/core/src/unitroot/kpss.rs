use nalgebra::DMatrix;

use super::pp::long_run_variance;
use super::{critical_values, Bandwidth, DeterministicSpec, TestKind, UnitRootResult};
use crate::error::{Error, Result};
use crate::regress::ols_matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct KpssOptions {
    pub bandwidth: Bandwidth,
}

pub fn kpss(y: &[f64], spec: DeterministicSpec) -> Result<UnitRootResult> {
    kpss_with(y, spec, KpssOptions::default())
}

/// KPSS statistic `n^{-2} Σ S_t^2 / λ^2` where `S_t` are partial sums of the
/// residuals from regressing `y` on the deterministic terms. Right-tailed.
pub fn kpss_with(y: &[f64], spec: DeterministicSpec, opts: KpssOptions) -> Result<UnitRootResult> {
    let n = y.len();
    if n < 25 {
        return Err(Error::InsufficientData { needed: 25, got: n });
    }
    let residuals = match spec {
        DeterministicSpec::None => y.to_vec(),
        _ => {
            let k = spec.n_terms();
            let x = DMatrix::from_fn(n, k, |t, c| if c == 0 { 1.0 } else { (t + 1) as f64 });
            ols_matrix(y, x)?.residuals
        }
    };
    let lag = opts.bandwidth.resolve(n);
    let lambda2 = long_run_variance(&residuals, lag);
    if !(lambda2 > 0.0) {
        return Err(Error::Domain {
            index: 0,
            message: "non-positive long-run variance".into(),
        });
    }
    let mut partial = 0.0;
    let mut sum_sq = 0.0;
    for e in &residuals {
        partial += e;
        sum_sq += partial * partial;
    }
    let stat = sum_sq / (n as f64 * n as f64 * lambda2);
    let cv = critical_values(TestKind::Kpss, spec).expect("KPSS table covers every spec");
    Ok(UnitRootResult::new(TestKind::Kpss, stat, lag, spec, cv))
}
