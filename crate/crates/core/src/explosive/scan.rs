use rayon::prelude::*;
use serde::Serialize;

use super::{BsadfTrace, WindowConfig, WindowLag, MIN_WINDOW};
use crate::error::{Error, Result};
use crate::linalg::{cholesky_inverse_diag, cholesky_solve};
use crate::regress::ols_matrix;
use crate::unitroot::{adf, adf_regression, DeterministicSpec, LagChoice};

/// Fewest levels a window with `p` augmentation lags may contain.
fn window_floor(p: usize) -> usize {
    MIN_WINDOW.max(2 * p + 5)
}

/// ADF t-statistic with a constant on the levels `y[r1..=r2]`.
pub fn adf_window(y: &[f64], r1: usize, r2: usize, lags: LagChoice) -> Result<f64> {
    if r2 >= y.len() || r1 >= r2 {
        return Err(Error::invalid(format!(
            "window [{r1}, {r2}] not inside a sample of {}",
            y.len()
        )));
    }
    let w = &y[r1..=r2];
    match lags {
        LagChoice::Fixed(p) => {
            if w.len() < window_floor(p) {
                return Err(Error::InsufficientData {
                    needed: window_floor(p),
                    got: w.len(),
                });
            }
            let reg = adf_regression(w, DeterministicSpec::Constant, p, p)?;
            let fit = ols_matrix(&reg.response, reg.design)?;
            Ok(fit.t_stats()[reg.level_index])
        }
        LagChoice::Bic { .. } => Ok(adf(w, DeterministicSpec::Constant, lags)?.statistic),
    }
}

/// Forward and backward sup statistics from one pass over all windows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsyStatistics {
    pub r0: usize,
    /// Lag used in every window, `None` under per-window selection.
    pub lag: Option<usize>,
    pub sadf: f64,
    pub gsadf: f64,
    /// `ADF_0^{r2}` for `r2 = r0..T`.
    pub forward: Vec<f64>,
    /// `BSADF_{r2}` for `r2 = r0..T`.
    pub backward: Vec<f64>,
}

impl PsyStatistics {
    pub fn trace(&self) -> BsadfTrace {
        BsadfTrace::new(self.r0, self.backward.clone())
    }
}

/// SADF, GSADF and the BSADF sequence of `y`.
pub fn psy_statistics(y: &[f64], r0: usize, lags: WindowLag) -> Result<PsyStatistics> {
    WindowConfig::new(r0, y.len())?;
    if y.len() < r0 + 10 {
        return Err(Error::InsufficientData {
            needed: r0 + 10,
            got: y.len(),
        });
    }
    if let Some(v) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain {
            index: v,
            message: "non-finite value".into(),
        });
    }
    let lag = lags.resolve(y)?;
    let (forward, backward) = match (lags, lag) {
        (WindowLag::PerWindowBic { max_lag }, _) => {
            if r0 + 1 <= max_lag + 10 {
                return Err(Error::invalid(format!(
                    "minimum window {r0} too short for BIC over {max_lag} lags"
                )));
            }
            scan_per_window(y, r0, LagChoice::Bic { max_lag })
        }
        (_, Some(p)) => {
            if r0 + 1 < window_floor(p) {
                return Err(Error::invalid(format!(
                    "minimum window {r0} too short for {p} lags"
                )));
            }
            scan_fixed(y, r0, p)
        }
        (_, None) => unreachable!("only per-window selection leaves the lag open"),
    };
    let sadf = sup(&forward);
    let gsadf = sup(&backward);
    Ok(PsyStatistics {
        r0,
        lag,
        sadf,
        gsadf,
        forward,
        backward,
    })
}

/// `sup_{r2} ADF_0^{r2}`.
pub fn sadf(y: &[f64], r0: usize, lags: WindowLag) -> Result<f64> {
    psy_statistics(y, r0, lags).map(|s| s.sadf)
}

/// `sup_{r2} sup_{r1 <= r2 - r0} ADF_{r1}^{r2}`.
pub fn gsadf(y: &[f64], r0: usize, lags: WindowLag) -> Result<f64> {
    psy_statistics(y, r0, lags).map(|s| s.gsadf)
}

/// `BSADF_{r2}` for every end point `r2 >= r0`, without critical values.
pub fn bsadf_sequence(y: &[f64], r0: usize, lags: WindowLag) -> Result<BsadfTrace> {
    psy_statistics(y, r0, lags).map(|s| s.trace())
}

fn sup(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Per-window BIC: each window goes through the full ADF routine.
fn scan_per_window(y: &[f64], r0: usize, lags: LagChoice) -> (Vec<f64>, Vec<f64>) {
    let t = y.len();
    let rows: Vec<Vec<f64>> = (0..=t - 1 - r0)
        .into_par_iter()
        .map(|r1| {
            (r1 + r0..t)
                .map(|r2| adf_window(y, r1, r2, lags).unwrap_or(f64::NEG_INFINITY))
                .collect()
        })
        .collect();
    let mut backward = vec![f64::NEG_INFINITY; t - r0];
    for (r1, row) in rows.iter().enumerate() {
        for (j, &s) in row.iter().enumerate() {
            let slot = &mut backward[r1 + j];
            *slot = slot.max(s);
        }
    }
    (rows[0].clone(), backward)
}

/// Fixed-lag scan. For each start `r1` the regression moments are updated
/// one row at a time as the window end advances, so every window costs a
/// small `k x k` solve rather than a fresh regression. Levels are shifted
/// by `y[r1]` to keep the moments well conditioned; the intercept absorbs
/// the shift.
pub(crate) fn scan_fixed(y: &[f64], r0: usize, p: usize) -> (Vec<f64>, Vec<f64>) {
    let t = y.len();
    let mut forward = vec![f64::NEG_INFINITY; t - r0];
    let mut backward = vec![f64::NEG_INFINITY; t - r0];
    let dy: Vec<f64> = (0..t)
        .map(|i| if i == 0 { 0.0 } else { y[i] - y[i - 1] })
        .collect();
    let mut acc = Moments::new(2 + p);
    for r1 in 0..=t - 1 - r0 {
        let shift = y[r1];
        acc.reset();
        let mut simple = Simple::default();
        for row in (r1 + 1 + p)..t {
            let z = dy[row];
            let x = y[row - 1] - shift;
            if p == 0 {
                simple.push(x, z);
            } else {
                acc.x[0] = 1.0;
                acc.x[1] = x;
                for i in 1..=p {
                    acc.x[1 + i] = dy[row - i];
                }
                acc.push(z);
            }
            let r2 = row;
            if r2 - r1 < r0 {
                continue;
            }
            let stat = if p == 0 { simple.t_stat() } else { acc.t_stat() };
            let j = r2 - r0;
            if r1 == 0 {
                forward[j] = stat;
            }
            if stat > backward[j] {
                backward[j] = stat;
            }
        }
    }
    (forward, backward)
}

/// Running means and co-moments for the regression of `z` on `(1, x)`.
#[derive(Default)]
struct Simple {
    n: f64,
    mx: f64,
    mz: f64,
    cxx: f64,
    cxz: f64,
    czz: f64,
}

impl Simple {
    fn push(&mut self, x: f64, z: f64) {
        self.n += 1.0;
        let dx = x - self.mx;
        let dz = z - self.mz;
        self.mx += dx / self.n;
        self.mz += dz / self.n;
        self.cxx += dx * (x - self.mx);
        self.cxz += dx * (z - self.mz);
        self.czz += dz * (z - self.mz);
    }

    fn t_stat(&self) -> f64 {
        let norm2 = self.cxx + self.n * self.mx * self.mx;
        if !(self.cxx > 1e-18 * norm2) || self.n < 3.0 {
            return f64::NEG_INFINITY;
        }
        let b = self.cxz / self.cxx;
        if b == 0.0 {
            return 0.0;
        }
        let rss = (self.czz - b * self.cxz).max(1e-30 * self.czz);
        let s2 = rss / (self.n - 2.0);
        b / (s2 / self.cxx).sqrt()
    }
}

/// Cross-product accumulator for a regression with `k` columns, the second
/// of which is the lagged level.
struct Moments {
    k: usize,
    n: usize,
    x: Vec<f64>,
    xtx: Vec<f64>,
    xtz: Vec<f64>,
    ztz: f64,
    scratch: Vec<f64>,
    beta: Vec<f64>,
}

impl Moments {
    fn new(k: usize) -> Self {
        Moments {
            k,
            n: 0,
            x: vec![0.0; k],
            xtx: vec![0.0; k * k],
            xtz: vec![0.0; k],
            ztz: 0.0,
            scratch: vec![0.0; k * k],
            beta: vec![0.0; k],
        }
    }

    fn reset(&mut self) {
        self.n = 0;
        self.xtx.fill(0.0);
        self.xtz.fill(0.0);
        self.ztz = 0.0;
    }

    fn push(&mut self, z: f64) {
        let k = self.k;
        self.n += 1;
        for i in 0..k {
            let xi = self.x[i];
            self.xtz[i] += xi * z;
            for j in i..k {
                self.xtx[i * k + j] += xi * self.x[j];
            }
        }
        self.ztz += z * z;
    }

    fn t_stat(&mut self) -> f64 {
        let k = self.k;
        if self.n <= k {
            return f64::NEG_INFINITY;
        }
        for i in 0..k {
            for j in i..k {
                let v = self.xtx[i * k + j];
                self.scratch[i * k + j] = v;
                self.scratch[j * k + i] = v;
            }
        }
        self.beta.copy_from_slice(&self.xtz);
        if !cholesky_solve(&mut self.scratch, &mut self.beta, k) {
            return f64::NEG_INFINITY;
        }
        let fitted: f64 = self.beta.iter().zip(&self.xtz).map(|(b, c)| b * c).sum();
        let rss = (self.ztz - fitted).max(1e-30 * self.ztz);
        let s2 = rss / (self.n - k) as f64;
        let v = cholesky_inverse_diag(&self.scratch, k, 1);
        self.beta[1] / (s2 * v).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::replicate_rng;
    use crate::unitroot::adf_statistic;
    use proptest::prelude::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    pub(crate) fn random_walk(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = replicate_rng(seed, 0);
        let mut level = 0.0;
        (0..n)
            .map(|_| {
                level += rng.sample::<f64, _>(StandardNormal);
                level
            })
            .collect()
    }

    /// Simple-regression DF t-ratio computed from scratch with two-pass
    /// centred sums.
    fn df_closed_form(w: &[f64]) -> f64 {
        let x = &w[..w.len() - 1];
        let z: Vec<f64> = w.windows(2).map(|p| p[1] - p[0]).collect();
        let m = x.len() as f64;
        let mx = x.iter().sum::<f64>() / m;
        let mz = z.iter().sum::<f64>() / m;
        let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
        let sxz: f64 = x.iter().zip(&z).map(|(a, b)| (a - mx) * (b - mz)).sum();
        let b = sxz / sxx;
        let a = mz - b * mx;
        let rss: f64 = x.iter().zip(&z).map(|(xv, zv)| (zv - a - b * xv).powi(2)).sum();
        b / (rss / (m - 2.0) / sxx).sqrt()
    }

    /// Exhaustive nested loops over all admissible windows.
    fn oracle(y: &[f64], r0: usize, p: usize) -> (Vec<f64>, Vec<f64>) {
        let t = y.len();
        let mut fwd = vec![];
        let mut bwd = vec![];
        for r2 in r0..t {
            fwd.push(adf_window(y, 0, r2, LagChoice::Fixed(p)).unwrap());
            let mut best = f64::NEG_INFINITY;
            for r1 in 0..=r2 - r0 {
                best = best.max(adf_window(y, r1, r2, LagChoice::Fixed(p)).unwrap());
            }
            bwd.push(best);
        }
        (fwd, bwd)
    }

    #[test]
    fn full_window_is_plain_adf() {
        let y = random_walk(1, 120);
        for p in [0, 1, 3] {
            let w = adf_window(&y, 0, 119, LagChoice::Fixed(p)).unwrap();
            let a = adf_statistic(&y, DeterministicSpec::Constant, p).unwrap();
            assert!((w - a).abs() <= 1e-10);
        }
    }

    #[test]
    fn fifty_point_window_matches_closed_form() {
        let y = random_walk(50, 50);
        let w = adf_window(&y, 0, 49, LagChoice::Fixed(0)).unwrap();
        assert!((w - df_closed_form(&y)).abs() <= 1e-10);
    }

    #[test]
    fn exponential_growth_is_positive() {
        let y: Vec<f64> = (0..60).map(|t| 1.05f64.powi(t)).collect();
        assert!(adf_window(&y, 0, 59, LagChoice::Fixed(0)).unwrap() > 0.0);
        let s = psy_statistics(&y, 20, WindowLag::Fixed(0)).unwrap();
        assert!(s.sadf > 0.0);
    }

    #[test]
    fn window_errors() {
        let y = random_walk(2, 40);
        assert!(adf_window(&y, 5, 5, LagChoice::Fixed(0)).is_err());
        assert!(adf_window(&y, 0, 40, LagChoice::Fixed(0)).is_err());
        assert!(adf_window(&y, 0, 7, LagChoice::Fixed(0)).is_err());
        assert!(psy_statistics(&y, 35, WindowLag::Fixed(0)).is_err());
        assert!(psy_statistics(&y, 9, WindowLag::Fixed(0)).is_err());
    }

    #[test]
    fn lag_zero_matches_exhaustive_oracle() {
        let y = random_walk(7, 200);
        let s = psy_statistics(&y, 30, WindowLag::Fixed(0)).unwrap();
        let (fwd, bwd) = oracle(&y, 30, 0);
        for (a, b) in s.forward.iter().zip(&fwd).chain(s.backward.iter().zip(&bwd)) {
            assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        }
        let sup = bwd.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((s.gsadf - sup).abs() <= 1e-10);
    }

    #[test]
    fn augmented_lags_match_exhaustive_oracle() {
        let y = random_walk(8, 90);
        let s = psy_statistics(&y, 25, WindowLag::Fixed(2)).unwrap();
        let (fwd, bwd) = oracle(&y, 25, 2);
        for (a, b) in s.forward.iter().zip(&fwd).chain(s.backward.iter().zip(&bwd)) {
            assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn per_window_bic_agrees_with_window_calls() {
        let y = random_walk(9, 60);
        let s = psy_statistics(&y, 45, WindowLag::PerWindowBic { max_lag: 2 }).unwrap();
        let lags = LagChoice::Bic { max_lag: 2 };
        for (j, r2) in (45..60).enumerate() {
            let direct = (0..=r2 - 45)
                .map(|r1| adf_window(&y, r1, r2, lags).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(s.backward[j], direct);
        }
    }

    #[test]
    fn trace_starts_at_smallest_window() {
        let y = random_walk(10, 150);
        let s = psy_statistics(&y, 30, WindowLag::Fixed(0)).unwrap();
        let first = adf_window(&y, 0, 30, LagChoice::Fixed(0)).unwrap();
        assert!((s.backward[0] - first).abs() <= 1e-10);
        assert_eq!(s.backward.len(), 120);
        let max = s.trace().statistics.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((max - s.gsadf).abs() <= 1e-12);
    }

    #[test]
    fn constant_stretch_is_skipped() {
        let mut y = random_walk(11, 80);
        for v in &mut y[..25] {
            *v = 3.0;
        }
        let s = psy_statistics(&y, 15, WindowLag::Fixed(0)).unwrap();
        assert!(s.gsadf.is_finite());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gsadf_dominates_and_shrinks_with_r0(seed in 0u64..10_000, r0 in 12usize..40) {
            let y = random_walk(seed, 100);
            let a = psy_statistics(&y, r0, WindowLag::Fixed(0)).unwrap();
            let b = psy_statistics(&y, r0 + 5, WindowLag::Fixed(0)).unwrap();
            let full = adf_window(&y, 0, 99, LagChoice::Fixed(0)).unwrap();
            prop_assert!(a.gsadf >= a.sadf);
            prop_assert!(a.sadf >= full);
            prop_assert!(b.gsadf <= a.gsadf);
        }
    }
}
