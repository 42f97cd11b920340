use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::ols;
use crate::series::TimeSeries;

/// Days per month on the Gregorian calendar, `365.2425 / 12`. A week is
/// therefore `12 / 52.1775` months.
pub const DAYS_PER_MONTH: f64 = 365.2425 / 12.0;

/// Fewest observations accepted for a trend fit.
pub const MIN_TREND_OBS: usize = 8;

/// `ln p_t = a t + b` with `t` in months since the first observation of the
/// window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrendFit {
    /// Monthly growth rate `a`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub n_obs: usize,
}

impl TrendFit {
    /// `ρ̂ = exp(-a)`; fails unless the trend is explosive.
    pub fn rho_hat(&self) -> Result<f64> {
        rho_from_growth(self.slope)
    }
}

/// Least-squares exponential trend on the prices dated within `[from, to]`.
pub fn fit_exponential_trend(ts: &TimeSeries, from: NaiveDate, to: NaiveDate) -> Result<TrendFit> {
    let w = ts.slice_dates(from, to)?;
    if w.len() < MIN_TREND_OBS {
        return Err(Error::InsufficientData {
            needed: MIN_TREND_OBS,
            got: w.len(),
        });
    }
    if let Some(i) = w.values().iter().position(|p| *p <= 0.0) {
        let index = ts.timestamps().iter().position(|d| *d == w.timestamps()[i]).unwrap_or(i);
        return Err(Error::Domain {
            index,
            message: format!("non-positive price {} in trend window", w.values()[i]),
        });
    }
    let start = w.timestamps()[0];
    let months: Vec<f64> = w
        .timestamps()
        .iter()
        .map(|d| (*d - start).num_days() as f64 / DAYS_PER_MONTH)
        .collect();
    let logs: Vec<f64> = w.values().iter().map(|p| p.ln()).collect();
    let x = nalgebra::DMatrix::from_column_slice(months.len(), 1, &months);
    let fit = ols(&logs, &x, true)?;
    let mean = logs.iter().sum::<f64>() / logs.len() as f64;
    let tss: f64 = logs.iter().map(|v| (v - mean).powi(2)).sum();
    let r_squared = if tss > 0.0 { (1.0 - fit.rss / tss).clamp(0.0, 1.0) } else { 1.0 };
    Ok(TrendFit {
        slope: fit.coefficients[1],
        intercept: fit.coefficients[0],
        r_squared,
        start,
        end: *w.timestamps().last().unwrap(),
        n_obs: w.len(),
    })
}

/// Noncausal coefficient implied by a monthly growth rate: `exp(-a)`.
pub fn rho_from_growth(a: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::NoExplosiveTrend(a));
    }
    Ok((-a).exp())
}

fn check(rho: f64, alpha: f64) -> Result<()> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid(format!("rho {rho} outside (0, 1)")));
    }
    if !(0.5..=2.0).contains(&alpha) {
        return Err(Error::invalid(format!("tail exponent {alpha} outside [0.5, 2]")));
    }
    Ok(())
}

/// Horizon at which a bubble survives with probability one half,
/// `-ln 2 / (α ln ρ)`.
pub fn half_life(rho: f64, alpha: f64) -> Result<f64> {
    check(rho, alpha)?;
    Ok(-std::f64::consts::LN_2 / (alpha * rho.ln()))
}

/// Probability that a bubble crashes within `h` periods, `1 - ρ^{αh}`.
pub fn crash_odds(rho: f64, alpha: f64, h: f64) -> Result<f64> {
    check(rho, alpha)?;
    if !(h >= 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("horizon {h} must be non-negative")));
    }
    Ok(-(alpha * h * rho.ln()).exp_m1())
}

/// `1 / (1 - ρ^α)`.
pub fn expected_duration(rho: f64, alpha: f64) -> Result<f64> {
    check(rho, alpha)?;
    Ok(-1.0 / (alpha * rho.ln()).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    fn of(a: f64, b: f64) -> Bounds {
        Bounds {
            lower: a.min(b),
            upper: a.max(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorizonOdds {
    pub months: f64,
    /// Crash probabilities in `[0, 1]`.
    pub odds: Bounds,
}

/// Crash-odds bounds over a range of tail exponents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashOddsReport {
    pub units: String,
    pub growth_rate: f64,
    pub rho: f64,
    pub alpha_range: [f64; 2],
    pub horizons: Vec<HorizonOdds>,
    pub half_life: Bounds,
    pub expected_duration: Bounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trend: Option<TrendFit>,
}

impl CrashOddsReport {
    /// Report for a monthly growth rate `a`. Crash odds rise with `α` while
    /// half-life and duration fall, so the endpoints of the range bound
    /// every value inside it.
    pub fn from_growth(a: f64, alpha_range: [f64; 2], horizons: &[f64]) -> Result<Self> {
        let rho = rho_from_growth(a)?;
        let [lo, hi] = alpha_range;
        if lo > hi {
            return Err(Error::invalid(format!("tail exponent range [{lo}, {hi}] is reversed")));
        }
        check(rho, lo)?;
        check(rho, hi)?;
        let horizons = horizons
            .iter()
            .map(|&h| {
                Ok(HorizonOdds {
                    months: h,
                    odds: Bounds::of(crash_odds(rho, lo, h)?, crash_odds(rho, hi, h)?),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CrashOddsReport {
            units: "months".into(),
            growth_rate: a,
            rho,
            alpha_range,
            horizons,
            half_life: Bounds::of(half_life(rho, lo)?, half_life(rho, hi)?),
            expected_duration: Bounds::of(expected_duration(rho, lo)?, expected_duration(rho, hi)?),
            trend: None,
        })
    }
}

pub fn crash_odds_report(fit: &TrendFit, alpha_range: [f64; 2], horizons: &[f64]) -> Result<CrashOddsReport> {
    let mut r = CrashOddsReport::from_growth(fit.slope, alpha_range, horizons)?;
    r.trend = Some(fit.clone());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::master_rng;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn weekly(values: Vec<f64>) -> TimeSeries {
        TimeSeries::weekly_from("p", NaiveDate::from_ymd_opt(2018, 3, 5).unwrap(), values).unwrap()
    }

    fn week_months(i: usize) -> f64 {
        i as f64 * 12.0 / 52.1775
    }

    #[test]
    fn exact_exponential() {
        let ts = weekly((0..40).map(|i| (0.02 * week_months(i) + 1.5).exp()).collect());
        let (from, to) = (ts.timestamps()[0], *ts.timestamps().last().unwrap());
        let f = fit_exponential_trend(&ts, from, to).unwrap();
        assert!((f.slope - 0.02).abs() < 1e-12);
        assert!((f.intercept - 1.5).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(f.n_obs, 40);
    }

    #[test]
    fn matches_closed_form_regression() {
        let mut rng = master_rng(10);
        let v: Vec<f64> = (0..10)
            .map(|i| (0.05 * week_months(i) + 0.1 * rng.sample::<f64, _>(StandardNormal)).exp() * 20.0)
            .collect();
        let ts = weekly(v.clone());
        let f = fit_exponential_trend(&ts, ts.timestamps()[0], ts.timestamps()[9]).unwrap();
        let t: Vec<f64> = (0..10).map(week_months).collect();
        let y: Vec<f64> = v.iter().map(|p| p.ln()).collect();
        let (tm, ym) = (t.iter().sum::<f64>() / 10.0, y.iter().sum::<f64>() / 10.0);
        let sxy: f64 = t.iter().zip(&y).map(|(a, b)| (a - tm) * (b - ym)).sum();
        let sxx: f64 = t.iter().map(|a| (a - tm).powi(2)).sum();
        let a = sxy / sxx;
        assert!((f.slope - a).abs() < 1e-10);
        assert!((f.intercept - (ym - a * tm)).abs() < 1e-10);
    }

    #[test]
    fn window_and_domain_errors() {
        let mut v: Vec<f64> = (0..20).map(|i| 10.0 + i as f64).collect();
        let ts = weekly(v.clone());
        let d = ts.timestamps().to_vec();
        assert!(matches!(
            fit_exponential_trend(&ts, d[0], d[6]),
            Err(Error::InsufficientData { needed: 8, got: 7 })
        ));
        v[12] = 0.0;
        let bad = weekly(v);
        assert!(matches!(fit_exponential_trend(&bad, d[0], d[19]), Err(Error::Domain { index: 12, .. })));
        let falling = weekly((0..20).map(|i| 30.0 - i as f64).collect());
        let f = fit_exponential_trend(&falling, d[0], d[19]).unwrap();
        assert!(matches!(f.rho_hat(), Err(Error::NoExplosiveTrend(_))));
    }

    #[test]
    fn rho_mapping() {
        assert_eq!((rho_from_growth(0.081).unwrap() * 100.0).round() / 100.0, 0.92);
        assert_eq!((rho_from_growth(0.095).unwrap() * 100.0).round() / 100.0, 0.91);
        assert!((rho_from_growth(0.081).unwrap() - 0.9222).abs() < 5e-5);
        assert!((rho_from_growth(0.095).unwrap() - 0.9094).abs() < 5e-5);
        assert!(rho_from_growth(1e-12).unwrap() < 1.0);
        assert!(rho_from_growth(0.0).is_err());
        assert!(rho_from_growth(-0.01).is_err());
    }

    #[test]
    fn formula_values() {
        assert!((half_life(0.92, 2.0).unwrap() - 4.156).abs() < 1e-3);
        assert!((half_life(0.92, 0.5).unwrap() - 16.62).abs() < 1e-2);
        assert!((half_life(0.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(crash_odds(0.8, 1.2, 0.0).unwrap(), 0.0);
        assert!((expected_duration(0.92, 2.0).unwrap() - 6.51).abs() < 0.01);
        assert!((expected_duration(0.92, 0.5).unwrap() - 24.5).abs() < 0.05);
        assert!((expected_duration(1e-12, 1.0).unwrap() - 1.0).abs() < 1e-9);
        assert!(half_life(1.0, 1.0).is_err());
        assert!(crash_odds(0.9, 0.4, 1.0).is_err());
        assert!(crash_odds(0.9, 1.0, -1.0).is_err());
    }

    #[test]
    fn odds_spot_values() {
        let cases = [
            (0.92, 2.0, 1.0, 0.15),
            (0.92, 0.5, 1.0, 0.040),
            (0.92, 2.0, 12.0, 0.86),
            (0.92, 0.5, 12.0, 0.39),
            (0.91, 2.0, 3.0, 0.44),
            (0.91, 2.0, 6.0, 0.68),
        ];
        for (rho, alpha, h, want) in cases {
            let got = crash_odds(rho, alpha, h).unwrap();
            assert!((got - want).abs() <= 0.01, "{rho} {alpha} {h}: {got}");
        }
    }

    /// Reference values, in percent and months.
    const LEFT: ([f64; 4], [f64; 4], [f64; 2]) = ([4.0, 11.0, 22.0, 39.0], [15.0, 39.0, 62.0, 86.0], [7.0, 25.0]);
    const RIGHT: ([f64; 4], [f64; 4], [f64; 2]) = ([4.6, 13.0, 25.0, 44.0], [17.0, 44.0, 68.0, 90.0], [6.0, 22.0]);

    #[test]
    fn crash_odds_table() {
        for (a, (lower, upper, duration)) in [(0.081, LEFT), (0.095, RIGHT)] {
            let r = CrashOddsReport::from_growth(a, [0.5, 2.0], &[1.0, 3.0, 6.0, 12.0]).unwrap();
            for (i, h) in r.horizons.iter().enumerate() {
                assert!((100.0 * h.odds.lower - lower[i]).abs() <= 1.0, "{a} {h:?}");
                assert!((100.0 * h.odds.upper - upper[i]).abs() <= 1.0, "{a} {h:?}");
            }
            assert!((r.expected_duration.lower - duration[0]).abs() <= 1.0);
            assert!((r.expected_duration.upper - duration[1]).abs() <= 1.0);
        }
    }

    #[test]
    fn collapsed_range() {
        let r = CrashOddsReport::from_growth(0.05, [1.3, 1.3], &[1.0, 2.0, 5.0]).unwrap();
        for h in &r.horizons {
            assert_eq!(h.odds.lower, h.odds.upper);
        }
        assert!(CrashOddsReport::from_growth(0.05, [2.0, 0.5], &[1.0]).is_err());
        assert!(CrashOddsReport::from_growth(0.05, [0.4, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn report_from_fit_matches_direct_path() {
        let ts = weekly((0..30).map(|i| (0.081 * week_months(i)).exp()).collect());
        let f = fit_exponential_trend(&ts, ts.timestamps()[0], ts.timestamps()[29]).unwrap();
        let via_fit = crash_odds_report(&f, [0.5, 2.0], &[1.0, 3.0]).unwrap();
        let direct = CrashOddsReport::from_growth(0.081, [0.5, 2.0], &[1.0, 3.0]).unwrap();
        for (p, q) in via_fit.horizons.iter().zip(&direct.horizons) {
            assert!((p.odds.lower - q.odds.lower).abs() < 1e-12);
            assert!((p.odds.upper - q.odds.upper).abs() < 1e-12);
        }
        let json = serde_json::to_value(&via_fit).unwrap();
        assert_eq!(json["units"], "months");
        assert!(json["trend"]["slope"].is_number());
    }

    #[test]
    fn monotone_grid() {
        let rhos = [0.5, 0.7, 0.9, 0.95, 0.99];
        let alphas = [0.5, 1.0, 1.5, 2.0];
        for &r in &rhos {
            for &a in &alphas {
                for h in 1..24 {
                    let (h0, h1) = (h as f64, (h + 1) as f64);
                    assert!(crash_odds(r, a, h1).unwrap() > crash_odds(r, a, h0).unwrap());
                }
            }
            for w in alphas.windows(2) {
                assert!(crash_odds(r, w[1], 3.0).unwrap() > crash_odds(r, w[0], 3.0).unwrap());
            }
        }
        for w in rhos.windows(2) {
            assert!(crash_odds(w[1], 1.0, 3.0).unwrap() < crash_odds(w[0], 1.0, 3.0).unwrap());
        }
    }

    proptest! {
        #[test]
        fn two_displays_agree(rho in 0.01f64..0.999, alpha in 0.5f64..=2.0, h in 0.0f64..48.0) {
            let via_half_life = 1.0 - 0.5f64.powf(h / half_life(rho, alpha).unwrap());
            prop_assert!((crash_odds(rho, alpha, h).unwrap() - via_half_life).abs() < 1e-12);
        }

        #[test]
        fn report_bounds_are_ordered(a in 0.001f64..1.0, lo in 0.5f64..2.0, width in 0.0f64..1.5) {
            let hi = (lo + width).min(2.0);
            let r = CrashOddsReport::from_growth(a, [lo, hi], &[1.0, 3.0, 6.0, 12.0]).unwrap();
            for w in r.horizons.windows(2) {
                prop_assert!(w[1].odds.lower >= w[0].odds.lower && w[1].odds.upper >= w[0].odds.upper);
            }
            for h in &r.horizons {
                prop_assert!(0.0 <= h.odds.lower && h.odds.lower <= h.odds.upper && h.odds.upper <= 1.0);
            }
        }
    }
}
