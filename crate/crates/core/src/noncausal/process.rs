use serde::{Deserialize, Serialize};

use super::StableParams;
use crate::error::{Error, Result};
use crate::rng::master_rng;

/// Seed whose demonstration path shows a full rise and collapse.
pub const DEMO_SEED: u64 = 357;

/// Default number of extra future shocks beyond the sample end.
pub const DEFAULT_TRUNCATION: usize = 500;

/// `X_t = ρ X_{t+1} + ε_t` with i.i.d. stable shocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoncausalAr1 {
    pub rho: f64,
    pub shocks: StableParams,
}

impl NoncausalAr1 {
    pub fn new(rho: f64, shocks: StableParams) -> Result<Self> {
        let m = NoncausalAr1 { rho, shocks };
        m.validate()?;
        Ok(m)
    }

    /// `ρ` may be zero here, which makes the path the shock sequence itself.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rho) {
            return Err(Error::invalid(format!("noncausal rho {} outside [0, 1)", self.rho)));
        }
        self.shocks.validate()
    }
}

/// Simulates `n` values of the forward moving average
/// `X_t = Σ_k ρ^k ε_{t+k}` from `n + truncation` shocks, by the backward
/// recursion `X_t = ρ X_{t+1} + ε_t` started at zero after the last shock.
///
/// Shocks are drawn in time order, so a larger `truncation` only appends
/// shocks. The last value omits terms of total size at most
/// `ρ^{truncation+1} sup|ε| / (1 - ρ)`, and earlier values omit less.
pub fn simulate_noncausal_ar1(model: &NoncausalAr1, n: usize, truncation: usize, seed: u64) -> Result<Vec<f64>> {
    model.validate()?;
    if truncation == 0 {
        return Err(Error::invalid("truncation must be at least 1"));
    }
    let mut rng = master_rng(seed);
    let shocks: Vec<f64> = (0..n + truncation).map(|_| model.shocks.sample(&mut rng)).collect();
    let mut x = 0.0;
    let mut path = vec![0.0; n];
    for t in (0..n + truncation).rev() {
        x = model.rho * x + shocks[t];
        if t < n {
            path[t] = x;
        }
    }
    Ok(path)
}

/// Empirical survival of high-level episodes on a simulated path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurvivalStats {
    pub threshold: f64,
    pub entries: usize,
    pub horizons: Vec<usize>,
    /// Fraction of entries with `X_{t+h} > X_t` at each horizon.
    pub survival: Vec<f64>,
    /// The same fractions for entries below and above the median entry level.
    pub survival_low: Vec<f64>,
    pub survival_high: Vec<f64>,
}

/// For every `t` with `X_t > threshold`, records whether the path stands
/// above `X_t` after `h` steps. Far in the tail a surviving bubble has grown
/// to about `ρ^{-h} X_t` while a crashed one is back near ordinary levels,
/// so this fraction estimates the survival probability `ρ^{αh}`.
pub fn bubble_survival(path: &[f64], threshold: f64, horizons: &[usize]) -> Result<SurvivalStats> {
    let max_h = horizons.iter().copied().max().unwrap_or(0);
    if max_h == 0 || horizons.contains(&0) {
        return Err(Error::invalid("survival horizons must be positive"));
    }
    let entries: Vec<usize> = (0..path.len().saturating_sub(max_h))
        .filter(|&t| path[t] > threshold)
        .collect();
    if entries.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: entries.len(),
        });
    }
    let mut levels: Vec<f64> = entries.iter().map(|&t| path[t]).collect();
    levels.sort_by(f64::total_cmp);
    let cut = levels[levels.len() / 2];
    let (low, high): (Vec<usize>, Vec<usize>) = entries.iter().partition(|&&t| path[t] < cut);
    let frac = |set: &[usize], h: usize| set.iter().filter(|&&t| path[t + h] > path[t]).count() as f64 / set.len() as f64;
    Ok(SurvivalStats {
        threshold,
        entries: entries.len(),
        horizons: horizons.to_vec(),
        survival: horizons.iter().map(|&h| frac(&entries, h)).collect(),
        survival_low: horizons.iter().map(|&h| frac(&low, h)).collect(),
        survival_high: horizons.iter().map(|&h| frac(&high, h)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noncausal::{hill_estimator, stable_sample};
    use crate::quantile::{median, quantiles};

    fn demo_model() -> NoncausalAr1 {
        NoncausalAr1::new(0.95, StableParams::new(1.7, 1.0, 0.1, 0.5).unwrap()).unwrap()
    }

    #[test]
    fn zero_rho_returns_shocks() {
        let m = NoncausalAr1::new(0.0, StableParams::new(1.5, 0.3, 1.0, 0.0).unwrap()).unwrap();
        let path = simulate_noncausal_ar1(&m, 200, 10, 9).unwrap();
        let shocks = stable_sample(&m.shocks, 200, 9).unwrap();
        assert_eq!(path, shocks);
    }

    #[test]
    fn recursion_holds_inside_sample() {
        let m = demo_model();
        let path = simulate_noncausal_ar1(&m, 300, 50, 2).unwrap();
        let shocks = stable_sample(&m.shocks, 350, 2).unwrap();
        for t in 0..299 {
            let rhs = m.rho * path[t + 1] + shocks[t];
            assert!((path[t] - rhs).abs() <= 1e-9 * path[t].abs().max(1.0));
        }
    }

    #[test]
    fn truncation_error_bound() {
        let m = demo_model();
        let (n, seed) = (1000, 4);
        let short = simulate_noncausal_ar1(&m, n, 200, seed).unwrap();
        let long = simulate_noncausal_ar1(&m, n, 400, seed).unwrap();
        let shocks = stable_sample(&m.shocks, n + 400, seed).unwrap();
        let scale = shocks[n + 200..].iter().fold(0.0f64, |a, e| a.max(e.abs()));
        let bound = scale * m.rho.powi(200) / (1.0 - m.rho);
        let gap = short.iter().zip(&long).fold(0.0f64, |a, (p, q)| a.max((p - q).abs()));
        assert!(gap < bound, "{gap} vs {bound}");
    }

    #[test]
    fn demo_path_has_a_bubble() {
        let m = demo_model();
        let path = simulate_noncausal_ar1(&m, 2000, DEFAULT_TRUNCATION, DEMO_SEED).unwrap();
        let med = median(&path);
        let peak = (0..path.len()).max_by(|&i, &j| path[i].total_cmp(&path[j])).unwrap();
        assert!(path[peak] > 10.0 * med, "peak {} median {med}", path[peak]);
        // collapses back to ordinary levels right after the peak
        assert!(peak + 1 < path.len() && path[peak + 1] < 2.0 * med);
    }

    #[test]
    fn memoryless_survival() {
        let m = NoncausalAr1::new(0.9, StableParams::new(1.5, 1.0, 1.0, 0.0).unwrap()).unwrap();
        let path = simulate_noncausal_ar1(&m, 200_000, DEFAULT_TRUNCATION, 21).unwrap();
        let threshold = quantiles(&path, &[0.995])[0];
        let s = bubble_survival(&path, threshold, &[1, 2, 3]).unwrap();
        for (i, h) in [1, 2, 3].into_iter().enumerate() {
            let target = m.rho.powf(m.shocks.alpha * h as f64);
            assert!((s.survival[i] - target).abs() <= 0.05, "h={h}: {s:?}");
            assert!((s.survival_low[i] - s.survival_high[i]).abs() <= 0.05, "h={h}: {s:?}");
        }
    }

    #[test]
    fn marginal_tail_index() {
        let m = NoncausalAr1::new(0.9, StableParams::new(1.5, 1.0, 1.0, 0.0).unwrap()).unwrap();
        let path = simulate_noncausal_ar1(&m, 100_000, DEFAULT_TRUNCATION, 22).unwrap();
        let hill = hill_estimator(&path, 1_000).unwrap();
        assert!((hill - 1.5).abs() <= 0.3, "{hill}");
    }

    #[test]
    fn rejects_bad_model() {
        let s = StableParams::new(1.5, 0.0, 1.0, 0.0).unwrap();
        assert!(NoncausalAr1::new(1.0, s).is_err());
        assert!(NoncausalAr1::new(-0.1, s).is_err());
        let m = NoncausalAr1::new(0.5, s).unwrap();
        assert!(simulate_noncausal_ar1(&m, 10, 0, 1).is_err());
        assert!(bubble_survival(&[1.0, 2.0, 3.0], 0.0, &[0]).is_err());
    }
}
