use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::scan::scan_fixed;
use super::{WindowConfig, MIN_WINDOW};
use crate::error::{Error, Result};
use crate::quantile::quantile_sorted;
use crate::regress::ols_matrix;
use crate::rng::replicate_rng;

/// Fewest replicates accepted for critical values.
pub const MIN_REPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CvMethod {
    MonteCarlo,
    SieveBootstrap,
}

impl CvMethod {
    pub fn name(self) -> &'static str {
        match self {
            CvMethod::MonteCarlo => "mc",
            CvMethod::SieveBootstrap => "bootstrap",
        }
    }
}

/// Null process `y_t = d T^{-η} + θ y_{t-1} + ε_t` with standard normal
/// errors, started from zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullDgpConfig {
    pub d: f64,
    pub eta: f64,
    pub theta: f64,
    pub t: usize,
}

impl NullDgpConfig {
    pub fn new(t: usize) -> Self {
        NullDgpConfig {
            d: 1.0,
            eta: 1.0,
            theta: 1.0,
            t,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.5) {
            return Err(Error::invalid(format!("eta {} must exceed 1/2", self.eta)));
        }
        if !(self.d.is_finite() && self.theta.is_finite()) {
            return Err(Error::invalid("null DGP parameters must be finite"));
        }
        Ok(())
    }

    pub fn simulate<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let drift = self.d * (self.t as f64).powf(-self.eta);
        let mut level = 0.0;
        (0..self.t)
            .map(|_| {
                level = drift + self.theta * level + rng.sample::<f64, _>(StandardNormal);
                level
            })
            .collect()
    }
}

/// Replicate-level sup statistics from a simulation or bootstrap run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationDraws {
    pub method: CvMethod,
    /// Human-readable description of everything the draws depend on.
    pub key: String,
    pub t: usize,
    pub r0: usize,
    pub sadf: Vec<f64>,
    pub gsadf: Vec<f64>,
    /// One BSADF trace (`r2 = r0..T`) per replicate.
    pub bsadf: Vec<Vec<f64>>,
}

/// Quantiles of the replicate draws at each level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsyCriticalValues {
    pub method: CvMethod,
    /// Confidence levels in percent.
    pub levels: Vec<f64>,
    pub sadf: Vec<f64>,
    pub gsadf: Vec<f64>,
    /// Per level, the critical value for each end point `r2 = r0..T`.
    pub bsadf: Vec<Vec<f64>>,
    pub reps: usize,
}

impl PsyCriticalValues {
    fn position(&self, level: f64) -> Option<usize> {
        self.levels.iter().position(|l| (l - level).abs() < 1e-9)
    }

    pub fn gsadf_at(&self, level: f64) -> Option<f64> {
        self.position(level).map(|i| self.gsadf[i])
    }

    pub fn bsadf_at(&self, level: f64) -> Option<&[f64]> {
        self.position(level).map(|i| self.bsadf[i].as_slice())
    }
}

fn check_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() || levels.iter().any(|l| !(*l > 0.0 && *l < 100.0)) {
        return Err(Error::invalid("critical-value levels must lie in (0, 100)"));
    }
    Ok(())
}

impl SimulationDraws {
    pub fn reps(&self) -> usize {
        self.gsadf.len()
    }

    pub fn critical_values(&self, levels: &[f64]) -> Result<PsyCriticalValues> {
        check_levels(levels)?;
        let probs: Vec<f64> = levels.iter().map(|l| l / 100.0).collect();
        let q = |v: &[f64]| -> Vec<f64> {
            let mut s = v.to_vec();
            s.sort_by(f64::total_cmp);
            probs.iter().map(|&p| quantile_sorted(&s, p)).collect()
        };
        let width = self.t - self.r0;
        let per_date: Vec<Vec<f64>> = (0..width)
            .into_par_iter()
            .map(|j| q(&self.bsadf.iter().map(|b| b[j]).collect::<Vec<_>>()))
            .collect();
        let bsadf = (0..levels.len())
            .map(|i| per_date.iter().map(|row| row[i]).collect())
            .collect();
        Ok(PsyCriticalValues {
            method: self.method,
            levels: levels.to_vec(),
            sadf: q(&self.sadf),
            gsadf: q(&self.gsadf),
            bsadf,
            reps: self.reps(),
        })
    }
}

fn check_common(t: usize, r0: usize, lag: usize, reps: usize) -> Result<()> {
    WindowConfig::new(r0, t)?;
    if t < r0 + 10 {
        return Err(Error::InsufficientData {
            needed: r0 + 10,
            got: t,
        });
    }
    if r0 + 1 < MIN_WINDOW.max(2 * lag + 5) {
        return Err(Error::invalid(format!("minimum window {r0} too short for {lag} lags")));
    }
    if reps < MIN_REPS {
        return Err(Error::invalid(format!(
            "{reps} replicates requested, at least {MIN_REPS} needed"
        )));
    }
    Ok(())
}

fn run_replicates<F>(
    method: CvMethod,
    key: String,
    t: usize,
    r0: usize,
    lag: usize,
    reps: usize,
    seed: u64,
    path: F,
) -> SimulationDraws
where
    F: Fn(&mut crate::rng::SimRng) -> Vec<f64> + Sync,
{
    let rows: Vec<(f64, f64, Vec<f64>)> = (0..reps as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(seed, r);
            let y = path(&mut rng);
            let (fwd, bwd) = scan_fixed(&y, r0, lag);
            let sup = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (sup(&fwd), sup(&bwd), bwd)
        })
        .collect();
    let mut draws = SimulationDraws {
        method,
        key,
        t,
        r0,
        sadf: Vec::with_capacity(reps),
        gsadf: Vec::with_capacity(reps),
        bsadf: Vec::with_capacity(reps),
    };
    for (s, g, b) in rows {
        draws.sadf.push(s);
        draws.gsadf.push(g);
        draws.bsadf.push(b);
    }
    draws
}

fn mc_key(dgp: &NullDgpConfig, r0: usize, lag: usize, reps: usize, seed: u64) -> String {
    format!(
        "method=mc;T={};r0={r0};lag={lag};reps={reps};seed={seed};d={};eta={};theta={}",
        dgp.t, dgp.d, dgp.eta, dgp.theta
    )
}

/// Sup statistics of `reps` paths from the null process.
pub fn mc_draws(
    dgp: &NullDgpConfig,
    r0: usize,
    lag: usize,
    reps: usize,
    seed: u64,
) -> Result<SimulationDraws> {
    dgp.validate()?;
    check_common(dgp.t, r0, lag, reps)?;
    let key = mc_key(dgp, r0, lag, reps, seed);
    Ok(run_replicates(CvMethod::MonteCarlo, key, dgp.t, r0, lag, reps, seed, |rng| {
        dgp.simulate(rng)
    }))
}

/// Monte-Carlo critical values under the default null (`d = η = θ = 1`)
/// with no augmentation lags.
pub fn mc_critical_values(
    t: usize,
    r0: usize,
    reps: usize,
    levels: &[f64],
    seed: u64,
) -> Result<PsyCriticalValues> {
    mc_draws(&NullDgpConfig::new(t), r0, 0, reps, seed)?.critical_values(levels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveOptions {
    /// Largest autoregressive order considered for the differences.
    pub max_order: usize,
    /// Augmentation lags of the windowed ADF regressions.
    pub lag: usize,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions { max_order: 8, lag: 0 }
    }
}

/// Autoregression for the differences: order by BIC on a common sample,
/// then refitted on all usable observations.
struct SieveFit {
    phi: Vec<f64>,
    residuals: Vec<f64>,
}

fn ar_design(d: &[f64], q: usize, start: usize) -> (Vec<f64>, DMatrix<f64>) {
    let rows = d.len() - start;
    let x = DMatrix::from_fn(rows, q + 1, |r, c| if c == 0 { 1.0 } else { d[start + r - c] });
    (d[start..].to_vec(), x)
}

fn fit_sieve(d: &[f64], max_order: usize) -> Result<SieveFit> {
    if d.len() <= max_order + 10 {
        return Err(Error::InsufficientData {
            needed: max_order + 12,
            got: d.len() + 1,
        });
    }
    let mut best = (f64::INFINITY, 0);
    for q in 0..=max_order {
        let (z, x) = ar_design(d, q, max_order);
        let m = z.len() as f64;
        let k = x.ncols() as f64;
        let Ok(fit) = ols_matrix(&z, x) else { continue };
        let bic = m * (fit.rss.max(f64::MIN_POSITIVE) / m).ln() + k * m.ln();
        if bic < best.0 {
            best = (bic, q);
        }
    }
    let q = best.1;
    let (z, x) = ar_design(d, q, q);
    let fit = ols_matrix(&z, x)?;
    let mean = fit.residuals.iter().sum::<f64>() / fit.residuals.len() as f64;
    Ok(SieveFit {
        phi: fit.coefficients[1..].to_vec(),
        residuals: fit.residuals.iter().map(|e| e - mean).collect(),
    })
}

fn data_hash(y: &[f64]) -> String {
    let mut h = Sha256::new();
    for v in y {
        h.update(v.to_le_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn sieve_key(y: &[f64], r0: usize, reps: usize, seed: u64, opts: &SieveOptions) -> String {
    format!(
        "method=bootstrap;T={};r0={r0};lag={};reps={reps};seed={seed};max_order={};data={}",
        y.len(),
        opts.lag,
        opts.max_order,
        data_hash(y)
    )
}

/// Sieve bootstrap draws under the unit-root null: an autoregression fitted
/// to `Δy` supplies the dynamics, its centred residuals are resampled with
/// replacement, and bootstrap levels are rebuilt from `y_0`.
pub fn sieve_bootstrap_draws(
    y: &[f64],
    r0: usize,
    reps: usize,
    seed: u64,
    opts: &SieveOptions,
) -> Result<SimulationDraws> {
    let t = y.len();
    check_common(t, r0, opts.lag, reps)?;
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain {
            index: i,
            message: "non-finite value".into(),
        });
    }
    let d: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let fit = fit_sieve(&d, opts.max_order)?;
    let q = fit.phi.len();
    let key = sieve_key(y, r0, reps, seed, opts);
    let e = &fit.residuals;
    Ok(run_replicates(CvMethod::SieveBootstrap, key, t, r0, opts.lag, reps, seed, |rng| {
        let mut ds = Vec::with_capacity(t - 1);
        ds.extend_from_slice(&d[..q]);
        for i in q..t - 1 {
            let mut v = e[rng.random_range(0..e.len())];
            for (j, p) in fit.phi.iter().enumerate() {
                v += p * ds[i - 1 - j];
            }
            ds.push(v);
        }
        let mut level = y[0];
        std::iter::once(level)
            .chain(ds.iter().map(|dv| {
                level += dv;
                level
            }))
            .collect()
    }))
}

pub fn sieve_bootstrap_cvs(
    y: &[f64],
    r0: usize,
    reps: usize,
    levels: &[f64],
    seed: u64,
    opts: &SieveOptions,
) -> Result<PsyCriticalValues> {
    sieve_bootstrap_draws(y, r0, reps, seed, opts)?.critical_values(levels)
}

/// On-disk store of replicate draws, one CSV per key.
///
/// Files start with a `# key: ...` comment, then a header
/// `replicate,sadf,gsadf,bsadf_<r2>...` and one row per replicate. Values
/// are written in shortest round-trip form, so a reload reproduces the draws
/// bit for bit.
#[derive(Debug, Clone)]
pub struct CvCache {
    dir: PathBuf,
}

impl CvCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CvCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, method: CvMethod, key: &str) -> PathBuf {
        let digest: String = Sha256::digest(key.as_bytes())[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        self.dir.join(format!("{}-{digest}.csv", method.name()))
    }

    /// Returns cached draws for `key`, or computes and stores them.
    pub fn get_or_compute<F>(&self, method: CvMethod, key: &str, compute: F) -> Result<SimulationDraws>
    where
        F: FnOnce() -> Result<SimulationDraws>,
    {
        let path = self.path_for(method, key);
        if path.exists() {
            if let Ok(d) = Self::read(&path, method, key) {
                return Ok(d);
            }
        }
        let draws = compute()?;
        self.write(&path, &draws)?;
        Ok(draws)
    }

    fn write(&self, path: &Path, draws: &SimulationDraws) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))?;
        let mut out = String::new();
        out.push_str(&format!("# key: {}\n", draws.key));
        out.push_str("replicate,sadf,gsadf");
        for r2 in draws.r0..draws.t {
            out.push_str(&format!(",bsadf_{r2}"));
        }
        out.push('\n');
        for (i, b) in draws.bsadf.iter().enumerate() {
            out.push_str(&format!("{i},{},{}", draws.sadf[i], draws.gsadf[i]));
            for v in b {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        let tmp = path.with_extension("csv.tmp");
        fs::write(&tmp, out).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }

    fn read(path: &Path, method: CvMethod, key: &str) -> Result<SimulationDraws> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut lines = text.lines();
        let stored = lines
            .next()
            .and_then(|l| l.strip_prefix("# key: "))
            .ok_or_else(|| Error::Config(format!("{} lacks a key line", path.display())))?;
        if stored != key {
            return Err(Error::Config(format!("{} holds a different key", path.display())));
        }
        let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
        let r0: usize = header
            .get(3)
            .and_then(|h| h.strip_prefix("bsadf_"))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Config(format!("{} has a malformed header", path.display())))?;
        let t = r0 + header.len() - 3;
        let mut draws = SimulationDraws {
            method,
            key: key.to_string(),
            t,
            r0,
            sadf: vec![],
            gsadf: vec![],
            bsadf: vec![],
        };
        for line in lines {
            let vals: Vec<f64> = line
                .split(',')
                .skip(1)
                .map(|v| v.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Config(format!("{} has a malformed row", path.display())))?;
            if vals.len() != header.len() - 1 {
                return Err(Error::Config(format!("{} has a short row", path.display())));
            }
            draws.sadf.push(vals[0]);
            draws.gsadf.push(vals[1]);
            draws.bsadf.push(vals[2..].to_vec());
        }
        Ok(draws)
    }
}

/// Draws for the null process, through the cache when one is given.
pub fn mc_draws_cached(
    dgp: &NullDgpConfig,
    r0: usize,
    lag: usize,
    reps: usize,
    seed: u64,
    cache: Option<&CvCache>,
) -> Result<SimulationDraws> {
    match cache {
        None => mc_draws(dgp, r0, lag, reps, seed),
        Some(c) => {
            dgp.validate()?;
            check_common(dgp.t, r0, lag, reps)?;
            c.get_or_compute(CvMethod::MonteCarlo, &mc_key(dgp, r0, lag, reps, seed), || {
                mc_draws(dgp, r0, lag, reps, seed)
            })
        }
    }
}

/// Sieve bootstrap draws, through the cache when one is given.
pub fn sieve_bootstrap_draws_cached(
    y: &[f64],
    r0: usize,
    reps: usize,
    seed: u64,
    opts: &SieveOptions,
    cache: Option<&CvCache>,
) -> Result<SimulationDraws> {
    match cache {
        None => sieve_bootstrap_draws(y, r0, reps, seed, opts),
        Some(c) => {
            check_common(y.len(), r0, opts.lag, reps)?;
            c.get_or_compute(CvMethod::SieveBootstrap, &sieve_key(y, r0, reps, seed, opts), || {
                sieve_bootstrap_draws(y, r0, reps, seed, opts)
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explosive::scan::psy_statistics;
    use crate::explosive::WindowLag;
    use crate::rng::master_rng;

    #[test]
    fn quantiles_increase_with_level() {
        let cv = mc_critical_values(100, 20, 200, &[90.0, 95.0, 99.0], 5).unwrap();
        assert!(cv.gsadf[0] <= cv.gsadf[1] && cv.gsadf[1] <= cv.gsadf[2]);
        assert!(cv.sadf[0] <= cv.sadf[1] && cv.sadf[1] <= cv.sadf[2]);
        for j in 0..80 {
            assert!(cv.bsadf[0][j] <= cv.bsadf[1][j] && cv.bsadf[1][j] <= cv.bsadf[2][j]);
        }
        assert_eq!(cv.bsadf_at(95.0).unwrap().len(), 80);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| mc_critical_values(120, 20, 200, &[95.0], 77).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.gsadf[0].to_bits(), b.gsadf[0].to_bits());
        assert_eq!(a.bsadf, b.bsadf);
    }

    #[test]
    fn draws_equal_direct_statistics() {
        let dgp = NullDgpConfig::new(80);
        let draws = mc_draws(&dgp, 15, 0, 200, 3).unwrap();
        let mut rng = replicate_rng(3, 17);
        let y = dgp.simulate(&mut rng);
        let s = psy_statistics(&y, 15, WindowLag::Fixed(0)).unwrap();
        assert_eq!(draws.gsadf[17], s.gsadf);
        assert_eq!(draws.sadf[17], s.sadf);
    }

    #[test]
    fn preconditions() {
        assert!(mc_critical_values(100, 20, 199, &[95.0], 1).is_err());
        assert!(mc_critical_values(100, 20, 200, &[100.0], 1).is_err());
        let bad = NullDgpConfig {
            eta: 0.5,
            ..NullDgpConfig::new(100)
        };
        assert!(mc_draws(&bad, 20, 0, 200, 1).is_err());
    }

    #[test]
    fn cache_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = CvCache::new(dir.path());
        let dgp = NullDgpConfig::new(60);
        let a = mc_draws_cached(&dgp, 12, 0, 200, 9, Some(&cache)).unwrap();
        let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
        assert_eq!(files.len(), 1);
        let b = mc_draws_cached(&dgp, 12, 0, 200, 9, Some(&cache)).unwrap();
        assert_eq!(a, b);
        let c = mc_draws_cached(&dgp, 12, 0, 200, 10, Some(&cache)).unwrap();
        assert_ne!(a.gsadf, c.gsadf);
    }

    fn walk(seed: u64, t: usize, phi: f64) -> Vec<f64> {
        let mut rng = master_rng(seed);
        let (mut level, mut d) = (0.0, 0.0);
        (0..t)
            .map(|_| {
                d = phi * d + rng.sample::<f64, _>(StandardNormal);
                level += d;
                level
            })
            .collect()
    }

    #[test]
    fn sieve_recovers_ar_order() {
        let y = walk(4, 600, 0.5);
        let d: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
        let fit = fit_sieve(&d, 8).unwrap();
        assert_eq!(fit.phi.len(), 1);
        assert!((fit.phi[0] - 0.5).abs() < 0.1);
        assert!(fit.residuals.iter().sum::<f64>().abs() < 1e-9);
    }

    #[test]
    fn bootstrap_matches_simulation_for_iid_increments() {
        let (t, r0) = (120, 20);
        let y = walk(12, t, 0.0);
        let boot = sieve_bootstrap_cvs(&y, r0, 500, &[95.0], 1, &SieveOptions::default()).unwrap();
        let mc = mc_critical_values(t, r0, 500, &[95.0], 2).unwrap();
        assert!(
            (boot.gsadf[0] - mc.gsadf[0]).abs() <= 0.25,
            "bootstrap {} vs simulated {}",
            boot.gsadf[0],
            mc.gsadf[0]
        );
    }

    #[test]
    fn bootstrap_raises_cv_for_correlated_increments() {
        let (t, r0) = (120, 20);
        let mc = mc_critical_values(t, r0, 1000, &[95.0], 3).unwrap().gsadf[0];
        let above = (0..50u64)
            .filter(|&m| {
                let y = walk(100 + m, t, 0.5);
                let b = sieve_bootstrap_cvs(&y, r0, 200, &[95.0], m, &SieveOptions::default())
                    .unwrap();
                b.gsadf[0] > mc
            })
            .count();
        assert!(above >= 40, "{above}/50 above");
    }
}
