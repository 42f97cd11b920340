use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{fitted_values, sample_grid, Kernel, LocalSmoother};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthMethod {
    /// Leave-one-out cross validation.
    Cv,
    /// Generalised cross validation `(RSS/n) / (1 - tr H / n)^2`.
    Gcv,
    /// Leave-`(2l+1)`-out cross validation.
    Mcv(usize),
    /// Corrected AIC `ln(RSS/n) + (n + tr H) / (n - tr H - 2)`.
    Aic,
}

impl BandwidthMethod {
    pub fn name(self) -> String {
        match self {
            BandwidthMethod::Cv => "cv".into(),
            BandwidthMethod::Gcv => "gcv".into(),
            BandwidthMethod::Mcv(l) => format!("mcv{l}"),
            BandwidthMethod::Aic => "aic".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandwidthChoice {
    pub method: BandwidthMethod,
    pub h: f64,
    /// Candidate bandwidths in ascending order.
    pub candidates: Vec<f64>,
    /// Criterion per candidate; `None` where the fit was not valid.
    pub criterion: Vec<Option<f64>>,
}

/// Squared-error terms are floored at this multiple of the response's mean
/// square so exact fits compare as ties rather than as rounding noise.
const RSS_FLOOR: f64 = 1e-20;

pub fn bandwidth_criterion(
    y: &[f64],
    x: &DMatrix<f64>,
    h: f64,
    method: BandwidthMethod,
    kernel: Kernel,
) -> Result<f64> {
    let n = y.len();
    if x.nrows() != n {
        return Err(Error::invalid("response and regressors differ in length"));
    }
    let nf = n as f64;
    let floor = RSS_FLOOR * y.iter().map(|v| v * v).sum::<f64>() / nf;
    match method {
        BandwidthMethod::Cv => leave_out(y, x, h, 0, kernel).map(|m| m.max(floor)),
        BandwidthMethod::Mcv(l) => leave_out(y, x, h, l, kernel).map(|m| m.max(floor)),
        BandwidthMethod::Gcv | BandwidthMethod::Aic => {
            let s = LocalSmoother::new(x, h, kernel, &sample_grid(n))?;
            let fitted = fitted_values(x, &s.estimates(y));
            let rss: f64 = y.iter().zip(&fitted).map(|(a, b)| (a - b).powi(2)).sum();
            let mse = (rss / nf).max(floor);
            let tr: f64 = s.hat_diagonal(x)?.iter().sum();
            match method {
                BandwidthMethod::Gcv if tr < nf => Ok(mse / (1.0 - tr / nf).powi(2)),
                BandwidthMethod::Aic if nf - tr - 2.0 > 0.0 => {
                    Ok(mse.ln() + (nf + tr) / (nf - tr - 2.0))
                }
                _ => Err(Error::invalid(format!(
                    "effective parameters {tr} too many at h = {h}"
                ))),
            }
        }
    }
}

/// Mean squared prediction error when observations `t-l..=t+l` are left out
/// of the local fit at `τ = t/n`.
fn leave_out(y: &[f64], x: &DMatrix<f64>, h: f64, l: usize, kernel: Kernel) -> Result<f64> {
    let (n, k) = x.shape();
    if !(h > 0.0) || !(n as f64 * h > 4.0 * k as f64) {
        return Err(Error::invalid(format!("bandwidth {h} too small")));
    }
    let nf = n as f64;
    let mut m = DMatrix::<f64>::zeros(2 * k, 2 * k);
    let mut rhs = DVector::<f64>::zeros(2 * k);
    let mut z = DVector::<f64>::zeros(2 * k);
    let mut sse = 0.0;
    for t in 0..n {
        let tau = (t + 1) as f64 / nf;
        m.fill(0.0);
        rhs.fill(0.0);
        let lo = ((tau - h) * nf).floor().max(1.0) as usize - 1;
        let hi = (((tau + h) * nf).ceil() as usize).min(n) - 1;
        for s in lo..=hi {
            if s.abs_diff(t) <= l {
                continue;
            }
            let u = ((s + 1) as f64 / nf - tau) / h;
            let w = kernel.eval(u);
            if w <= 0.0 {
                continue;
            }
            for j in 0..k {
                z[j] = x[(s, j)];
                z[k + j] = x[(s, j)] * u;
            }
            m.ger(w, &z, &z, 1.0);
            rhs.axpy(w * y[s], &z, 1.0);
        }
        let diag: Vec<f64> = (0..2 * k).map(|j| m[(j, j)]).collect();
        let chol = m.clone().cholesky().ok_or_else(|| singular(tau))?;
        let lf = chol.l_dirty();
        if (0..2 * k).any(|j| !(lf[(j, j)] * lf[(j, j)] > 1e-12 * diag[j])) {
            return Err(singular(tau));
        }
        let theta = chol.solve(&rhs);
        let pred: f64 = (0..k).map(|j| x[(t, j)] * theta[j]).sum();
        sse += (y[t] - pred).powi(2);
    }
    Ok(sse / nf)
}

fn singular(tau: f64) -> Error {
    Error::SingularDesign(format!("leave-out design singular at tau = {tau}"))
}

/// Minimises the criterion over `candidates`; ties go to the larger
/// bandwidth. Candidates whose fit fails are skipped.
pub fn select_bandwidth(
    y: &[f64],
    x: &DMatrix<f64>,
    method: BandwidthMethod,
    candidates: &[f64],
    kernel: Kernel,
) -> Result<BandwidthChoice> {
    if candidates.is_empty() || candidates.iter().any(|h| !(*h > 0.0 && *h <= 0.5)) {
        return Err(Error::invalid("candidate bandwidths must lie in (0, 0.5]"));
    }
    let mut hs = candidates.to_vec();
    hs.sort_by(f64::total_cmp);
    hs.dedup();
    let criterion: Vec<Option<f64>> = hs
        .iter()
        .map(|&h| bandwidth_criterion(y, x, h, method, kernel).ok().filter(|v| v.is_finite()))
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for (&h, c) in hs.iter().zip(&criterion) {
        if let Some(v) = *c {
            if best.is_none_or(|(b, _)| v <= b) {
                best = Some((v, h));
            }
        }
    }
    let (_, h) = best.ok_or_else(|| Error::invalid("no candidate bandwidth admits a valid fit"))?;
    Ok(BandwidthChoice {
        method,
        h,
        candidates: hs,
        criterion,
    })
}
