use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{master_rng, SimRng};

/// Parameters of the stable law with characteristic function
/// `exp{-σ^α |u|^α (1 - iβ sign(u) w(α, u)) + iuμ}`, where
/// `w = tan(πα/2)` for `α != 1` and `w = -(2/π) ln|u|` for `α = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        let p = StableParams {
            alpha,
            beta,
            sigma,
            mu,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::invalid(format!("stable alpha {} outside (0, 2]", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(Error::invalid(format!("stable beta {} outside [-1, 1]", self.beta)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::invalid(format!("stable scale {} must be positive", self.sigma)));
        }
        if !self.mu.is_finite() {
            return Err(Error::invalid("stable location must be finite"));
        }
        Ok(())
    }

    /// One draw by the Chambers-Mallows-Stuck transform.
    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        // V uniform on the open interval (-π/2, π/2)
        let v = loop {
            let u: f64 = rng.random();
            if u > 0.0 {
                break PI * (u - 0.5);
            }
        };
        let w: f64 = rng.sample(Exp1);
        if a == 1.0 {
            let bv = FRAC_PI_2 + b * v;
            let x = (bv * v.tan() - b * ((FRAC_PI_2 * w * v.cos()) / bv).ln()) / FRAC_PI_2;
            self.sigma * x + FRAC_PI_2.recip() * b * self.sigma * self.sigma.ln() + self.mu
        } else {
            let t = b * (PI * a / 2.0).tan();
            let shift = t.atan() / a;
            let scale = (1.0 + t * t).powf(1.0 / (2.0 * a));
            let x = scale * (a * (v + shift)).sin() / v.cos().powf(1.0 / a)
                * ((v - a * (v + shift)).cos() / w).powf((1.0 - a) / a);
            self.sigma * x + self.mu
        }
    }
}

/// `n` independent draws, reproducible from `seed`.
pub fn stable_sample(params: &StableParams, n: usize, seed: u64) -> Result<Vec<f64>> {
    params.validate()?;
    let mut rng = master_rng(seed);
    Ok((0..n).map(|_| params.sample(&mut rng)).collect())
}

/// Hill estimate of the tail index of `|x|` from its `k` largest values.
pub fn hill_estimator(x: &[f64], k: usize) -> Result<f64> {
    if k < 2 || k >= x.len() {
        return Err(Error::invalid(format!(
            "Hill estimator needs 2 <= k < n, got k = {k}, n = {}",
            x.len()
        )));
    }
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.total_cmp(p));
    let threshold = a[k];
    if !(threshold > 0.0) {
        return Err(Error::invalid("Hill estimator threshold is zero"));
    }
    let mean_excess = a[..k].iter().map(|v| (v / threshold).ln()).sum::<f64>() / k as f64;
    Ok(1.0 / mean_excess)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::{kolmogorov_smirnov, median};
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn gaussian_reduction() {
        let s = 0.7;
        let p = StableParams::new(2.0, 0.0, s, 0.0).unwrap();
        let x = stable_sample(&p, 10_000, 11).unwrap();
        let law = Normal::new(0.0, s * 2f64.sqrt()).unwrap();
        let ks = kolmogorov_smirnov(&x, |v| law.cdf(v));
        assert!(ks.p_value > 0.01, "{ks:?}");
    }

    #[test]
    fn gaussian_reduction_ignores_skewness() {
        let p = StableParams::new(2.0, 1.0, 1.0, 0.0).unwrap();
        let x = stable_sample(&p, 10_000, 12).unwrap();
        let law = Normal::new(0.0, 2f64.sqrt()).unwrap();
        assert!(kolmogorov_smirnov(&x, |v| law.cdf(v)).p_value > 0.01);
    }

    #[test]
    fn cauchy_location() {
        let p = StableParams::new(1.0, 0.0, 1.0, 5.0).unwrap();
        let x = stable_sample(&p, 10_000, 13).unwrap();
        assert!((median(&x) - 5.0).abs() < 0.1);
        let law = statrs::distribution::Cauchy::new(5.0, 1.0).unwrap();
        assert!(kolmogorov_smirnov(&x, |v| law.cdf(v)).p_value > 0.01);
    }

    #[test]
    fn levy_reduction() {
        // α = 1/2, β = 1 is the Lévy law: P(X <= x) = erfc(sqrt(σ / (2x))).
        let p = StableParams::new(0.5, 1.0, 1.0, 0.0).unwrap();
        let x = stable_sample(&p, 10_000, 14).unwrap();
        assert!(x.iter().all(|v| *v > 0.0));
        let cdf = |v: f64| if v <= 0.0 { 0.0 } else { statrs::function::erf::erfc((0.5 / v).sqrt()) };
        assert!(kolmogorov_smirnov(&x, cdf).p_value > 0.01);
    }

    /// Gil-Pelaez inversion of the characteristic function.
    fn inverted_cdf(p: &StableParams, x: f64) -> f64 {
        let t = p.beta * (PI * p.alpha / 2.0).tan();
        let du = 1e-3;
        let integral: f64 = (0..60_000)
            .map(|i| {
                let u = (i as f64 + 0.5) * du;
                let su = (p.sigma * u).powf(p.alpha);
                (-su).exp() * (su * t - u * (x - p.mu)).sin() / u
            })
            .sum::<f64>()
            * du;
        0.5 - integral / PI
    }

    #[test]
    fn matches_characteristic_function() {
        for (i, (a, b, s, m)) in [(1.7, 0.0, 1.0, 0.0), (1.7, 1.0, 0.1, 0.5), (1.2, -0.5, 2.0, 1.0)]
            .into_iter()
            .enumerate()
        {
            let p = StableParams::new(a, b, s, m).unwrap();
            let x = stable_sample(&p, 2000, 30 + i as u64).unwrap();
            let ks = kolmogorov_smirnov(&x, |v| inverted_cdf(&p, v));
            assert!(ks.p_value > 0.01, "{p:?}: {ks:?}");
        }
    }

    #[test]
    fn tail_index() {
        // Hill is biased upwards for alpha near 2 unless the tail fraction
        // is small; the top 1% is used here.
        let p = StableParams::new(1.7, 0.0, 1.0, 0.0).unwrap();
        let x = stable_sample(&p, 50_000, 15).unwrap();
        let hill = hill_estimator(&x, 500).unwrap();
        assert!((1.4..=2.0).contains(&hill), "{hill}");
    }

    #[test]
    fn deterministic_given_seed() {
        let p = StableParams::new(1.3, 0.5, 2.0, -1.0).unwrap();
        assert_eq!(stable_sample(&p, 50, 3).unwrap(), stable_sample(&p, 50, 3).unwrap());
        assert_ne!(stable_sample(&p, 50, 3).unwrap(), stable_sample(&p, 50, 4).unwrap());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StableParams::new(0.0, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(2.1, 0.0, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 1.1, 1.0, 0.0).is_err());
        assert!(StableParams::new(1.5, 0.0, 0.0, 0.0).is_err());
        assert!(hill_estimator(&[1.0, 2.0, 3.0], 3).is_err());
    }
}
