use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use nalgebra::DMatrix;
use serde_json::json;

use exuberance::explosive::{
    date_stamp, mc_draws_cached, min_duration, min_window, psy_statistics, sieve_bootstrap_draws_cached, CvCache,
    NullDgpConfig, PsyCriticalValues, PsyStatistics, SieveOptions, WindowLag,
};
use exuberance::noncausal::{
    crash_odds_report, fit_exponential_trend, simulate_noncausal_ar1, CrashOddsReport, NoncausalAr1, StableParams,
    DEMO_SEED,
};
use exuberance::regress::{fourier_deseason, iis_outliers, switching_price, IisOptions, SwitchingParams};
use exuberance::rng::master_rng;
use exuberance::series::{align_and_drop_missing, load_csv, log_returns, to_weekly_mean, CsvSchema, Panel, TimeSeries};
use exuberance::tvc::{
    awb_bands, local_linear_fit, sample_grid, select_bandwidth, significance_periods, AwbConfig, BandwidthMethod,
    Kernel,
};
use exuberance::unitroot::{adf, kpss, lnv, pp, DeterministicSpec, LagChoice, LnvOptions, UnitRootResult, LEVELS};

use crate::args::*;
use crate::output::{hex_digest, num, Metadata, Table, Writer};
use crate::CliError;

const DEFAULT_SEED: u64 = 1;
const DEFAULT_CV_REPS: usize = 2000;
const PROFILE_R0: usize = 40;
const PROFILE_H: f64 = 0.09;
const PROFILE_WINDOWS: [(&str, &str); 2] = [("2018-03-01", "2018-10-31"), ("2017-06-01", "2018-10-31")];

struct Ctx<'a> {
    global: &'a Global,
    seed: u64,
    out: PathBuf,
}

impl Ctx<'_> {
    fn profile(&self) -> bool {
        self.global.paper_profile
    }

    fn cache(&self) -> Option<CvCache> {
        if self.global.no_cache {
            return None;
        }
        let dir = self.global.cache_dir.clone().unwrap_or_else(|| self.out.join("cv-cache"));
        Some(CvCache::new(dir))
    }
}

pub fn dispatch(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let g = &cli.global;
    let figure_a = matches!(&cli.command, Command::Simulate(a) if a.figure_a || g.paper_profile);
    let seed = g.seed.unwrap_or(if figure_a { DEMO_SEED } else { DEFAULT_SEED });
    let ctx = Ctx {
        global: g,
        seed,
        out: g.out.clone().unwrap_or_else(|| PathBuf::from(".")),
    };
    let (name, inputs) = command_inputs(&cli.command);
    let hash = config_hash(cli, seed, &inputs)?;
    let format = g.format.unwrap_or(Format::Csv);
    let mut w = Writer::new(&ctx.out, format, Metadata::new(name, seed, hash))?;
    match &cli.command {
        Command::Ingest(a) => ingest(a, &mut w)?,
        Command::Unitroot(a) => unitroot(a, &mut w)?,
        Command::Tvc(a) => tvc(&ctx, a, &mut w)?,
        Command::Sadf(a) => sadf(&ctx, a, &mut w)?,
        Command::Datestamp(a) => datestamp(&ctx, a, &mut w)?,
        Command::Crashodds(a) => crashodds(&ctx, a, &mut w)?,
        Command::Simulate(a) => simulate(&ctx, a, figure_a, &mut w)?,
        Command::Iis(a) => iis(a, &mut w)?,
        Command::Deseason(a) => deseason(a, &mut w)?,
        Command::Switchprice(a) => switchprice(&ctx, a, &mut w)?,
    }
    Ok(w.written)
}

fn command_inputs(c: &Command) -> (&'static str, Vec<&Path>) {
    match c {
        Command::Ingest(a) => ("ingest", vec![&a.input.input]),
        Command::Unitroot(a) => ("unitroot", vec![&a.input.input]),
        Command::Tvc(a) => ("tvc", vec![&a.input.input]),
        Command::Sadf(a) => ("sadf", vec![&a.input.input]),
        Command::Datestamp(a) => ("datestamp", vec![&a.explosive.input.input]),
        Command::Crashodds(a) => ("crashodds", a.input.iter().map(|p| p.as_path()).collect()),
        Command::Simulate(_) => ("simulate", vec![]),
        Command::Iis(a) => ("iis", vec![&a.input.input]),
        Command::Deseason(a) => ("deseason", vec![&a.input.input]),
        Command::Switchprice(a) => ("switchprice", vec![&a.input.input]),
    }
}

/// Digest of everything that determines the output: the parsed command, the
/// seed, profile and format, and the bytes of every input file.
fn config_hash(cli: &Cli, seed: u64, inputs: &[&Path]) -> Result<String, CliError> {
    let mut text = format!(
        "{:?}\nseed={seed}\nprofile={}\nformat={:?}\n",
        cli.command, cli.global.paper_profile, cli.global.format
    );
    for p in inputs {
        let bytes = std::fs::read(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        text.push_str(&hex_digest(&bytes));
        text.push('\n');
    }
    Ok(hex_digest(text.as_bytes())[..16].to_string())
}

fn check_names(names: &[String]) -> Result<(), CliError> {
    if names.is_empty() || names.iter().any(|n| n.trim().is_empty()) {
        return Err(CliError::Config("empty column list".into()));
    }
    Ok(())
}

/// Loads the named columns (all when `None`), keeping missing cells.
fn load(input: &InputArgs, columns: Option<&[String]>) -> Result<Panel, CliError> {
    if let Some(c) = columns {
        check_names(c)?;
    }
    let schema = CsvSchema {
        date_column: input.date_column.clone(),
        value_columns: Vec::new(),
        date_format: input.date_format.clone(),
    };
    let panel = load_csv(&input.input, &schema)?;
    match columns {
        None => Ok(panel),
        Some(c) => {
            let names: Vec<&str> = c.iter().map(String::as_str).collect();
            Ok(panel.select(&names)?)
        }
    }
}

fn column_series(panel: &Panel) -> Result<Vec<TimeSeries>, CliError> {
    panel
        .column_names()
        .map(|n| panel.series(n).map_err(CliError::from))
        .collect()
}

/// Log returns of every column on the common dates.
fn returns_panel(panel: &Panel) -> Result<Panel, CliError> {
    let rets = column_series(panel)?
        .iter()
        .map(|s| log_returns(s).map(|r| r.into_series()))
        .collect::<exuberance::Result<Vec<_>>>()?;
    Ok(align_and_drop_missing(&rets)?)
}

fn date_text(d: NaiveDate) -> String {
    d.format("%Y-%m-%d").to_string()
}

fn parse_date(s: &str, format: &str) -> Result<NaiveDate, CliError> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, format))
        .map_err(|_| CliError::Config(format!("cannot parse date {s:?}")))
}

fn ingest(a: &IngestArgs, w: &mut Writer) -> Result<(), CliError> {
    let mut panel = load(&a.input, a.columns.as_deref())?.drop_missing()?;
    if a.weekly {
        let weekly = column_series(&panel)?
            .iter()
            .map(to_weekly_mean)
            .collect::<exuberance::Result<Vec<_>>>()?;
        panel = align_and_drop_missing(&weekly)?;
    }
    if a.returns {
        panel = returns_panel(&panel)?;
    }
    let mut header = vec!["date".to_string()];
    header.extend(panel.column_names().map(str::to_string));
    let mut t = Table {
        header,
        ..Table::default()
    };
    t.note("rows", panel.n_rows());
    t.note("weekly", a.weekly);
    t.note("returns", a.returns);
    for (i, d) in panel.timestamps().iter().enumerate() {
        let mut row = vec![date_text(*d)];
        row.extend(panel.columns().iter().map(|(_, c)| num(c[i])));
        t.push(row);
    }
    w.table("ingest", &t)
}

fn unitroot(a: &UnitrootArgs, w: &mut Writer) -> Result<(), CliError> {
    let panel = load(&a.input, a.columns.as_deref())?;
    if panel.n_columns() == 0 {
        return Err(CliError::Config("empty column list".into()));
    }
    let tests = a
        .tests
        .clone()
        .unwrap_or_else(|| vec![TestName::Adf, TestName::Pp, TestName::Kpss, TestName::Lnv]);
    let spec = match a.spec {
        SpecName::None => DeterministicSpec::None,
        SpecName::Constant => DeterministicSpec::Constant,
        SpecName::Trend => DeterministicSpec::ConstantTrend,
    };
    let mut t = Table::new(&[
        "series",
        "transform",
        "test",
        "statistic",
        "lag",
        "cv90",
        "cv95",
        "cv99",
        "reject90",
        "reject95",
        "reject99",
        "verdict95",
    ]);
    t.note("spec", format!("{spec:?}"));
    t.note("max_lag", a.max_lag);
    for ts in column_series(&panel)? {
        let mut variants = vec![("levels", ts.values().to_vec())];
        match log_returns(&ts) {
            Ok(r) => variants.push(("log_returns", r.values().to_vec())),
            Err(e) => t.note(&format!("{} returns skipped", ts.name()), e),
        }
        for (transform, y) in &variants {
            for test in &tests {
                let r = run_test(*test, y, spec, a.max_lag)?;
                t.push(unitroot_row(ts.name(), transform, &r));
            }
        }
    }
    w.table("unitroot", &t)
}

fn run_test(test: TestName, y: &[f64], spec: DeterministicSpec, max_lag: usize) -> exuberance::Result<UnitRootResult> {
    let lags = LagChoice::Bic { max_lag };
    match test {
        TestName::Adf => adf(y, spec, lags),
        TestName::Pp => pp(y, spec),
        TestName::Kpss => kpss(y, spec),
        TestName::Lnv => lnv(
            y,
            &LnvOptions {
                lags,
                ..LnvOptions::default()
            },
        ),
    }
}

fn unitroot_row(series: &str, transform: &str, r: &UnitRootResult) -> Vec<String> {
    let null = if r.test.right_tailed() { "stationarity" } else { "unit root" };
    let verdict = if r.rejects_at(95) { "rejected" } else { "not rejected" };
    let mut row = vec![
        series.to_string(),
        transform.to_string(),
        r.test.name().to_string(),
        num(r.statistic),
        r.lag.to_string(),
    ];
    row.extend(r.critical_values.values.iter().map(|v| num(*v)));
    row.extend(LEVELS.iter().map(|l| r.rejects_at(*l).to_string()));
    row.push(format!("{null} {verdict}"));
    row
}

/// Response and design matrix on common dates, optionally in log returns.
fn regression_data(
    input: &InputArgs,
    response: &str,
    regressors: &[String],
    returns: bool,
) -> Result<(Vec<NaiveDate>, Vec<f64>, DMatrix<f64>), CliError> {
    check_names(regressors)?;
    let mut names = vec![response.to_string()];
    names.extend(regressors.iter().cloned());
    let mut panel = load(input, Some(&names))?.drop_missing()?;
    if returns {
        panel = returns_panel(&panel)?;
    }
    let cols = panel.columns();
    let n = panel.n_rows();
    let x = DMatrix::from_fn(n, regressors.len(), |t, j| cols[j + 1].1[t]);
    Ok((panel.timestamps().to_vec(), cols[0].1.clone(), x))
}

fn keep_rows(dates: &mut Vec<NaiveDate>, y: &mut Vec<f64>, x: &mut DMatrix<f64>, drop: &[usize]) {
    let keep: Vec<usize> = (0..y.len()).filter(|i| !drop.contains(i)).collect();
    *dates = keep.iter().map(|&i| dates[i]).collect();
    *y = keep.iter().map(|&i| y[i]).collect();
    *x = x.select_rows(&keep);
}

fn tvc(ctx: &Ctx, a: &TvcArgs, w: &mut Writer) -> Result<(), CliError> {
    let (mut dates, mut y, mut xr) = regression_data(&a.input, &a.response, &a.regressors, a.returns)?;
    let mut removed = Vec::new();
    if a.iis || ctx.profile() {
        let opts = IisOptions {
            alpha: a.iis_alpha,
            blocks: 2,
            intercept: !a.no_intercept,
        };
        let r = iis_outliers(&y, &xr, &opts)?;
        removed = r.retained.iter().map(|&i| date_text(dates[i])).collect::<Vec<_>>();
        keep_rows(&mut dates, &mut y, &mut xr, &r.retained);
    }
    let mut names: Vec<String> = Vec::new();
    let x = if a.no_intercept {
        xr
    } else {
        names.push("intercept".into());
        xr.insert_column(0, 1.0)
    };
    names.extend(a.regressors.iter().cloned());
    let n = y.len();
    let kernel = Kernel::Epanechnikov;
    let (h, selection) = match a.h.or(if ctx.profile() { Some(PROFILE_H) } else { None }) {
        Some(h) => (h, None),
        None => {
            let method = match a.bandwidth_method {
                BandwidthName::Cv => BandwidthMethod::Cv,
                BandwidthName::Gcv => BandwidthMethod::Gcv,
                BandwidthName::Mcv => BandwidthMethod::Mcv(a.mcv_l),
                BandwidthName::Aic => BandwidthMethod::Aic,
            };
            let grid = a
                .h_grid
                .clone()
                .unwrap_or_else(|| (5..=30).map(|i| i as f64 / 100.0).collect());
            let choice = select_bandwidth(&y, &x, method, &grid, kernel)?;
            (choice.h, Some(choice))
        }
    };
    let grid = sample_grid(n);
    let curves = local_linear_fit(&y, &x, h, kernel, &grid)?;
    let config = AwbConfig {
        gamma: a.gamma,
        reps: a.bootstrap_reps.unwrap_or(999),
        h_tilde: None,
        seed: ctx.seed,
        kernel,
    };
    let bands = awb_bands(&y, &x, h, &grid, &config, a.level)?;
    let periods = significance_periods(&curves, &bands)?;

    let mut t = Table::new(&["date", "coefficient", "estimate", "lower", "upper", "boundary"]);
    t.note("h", num(h));
    t.note("level", num(a.level));
    t.note("bootstrap_reps", bands.reps);
    t.note("gamma", num(bands.gamma));
    t.note("h_tilde", num(bands.h_tilde));
    for (j, name) in names.iter().enumerate() {
        for i in 0..n {
            t.push(vec![
                date_text(dates[i]),
                name.clone(),
                num(curves.estimates[(i, j)]),
                num(bands.lower[j][i]),
                num(bands.upper[j][i]),
                curves.boundary[i].to_string(),
            ]);
        }
    }
    w.table("tvc_curves", &t)?;

    let coefficients: Vec<_> = names
        .iter()
        .zip(&periods)
        .map(|(name, ps)| {
            let full = ps.len() == 1 && ps[0].start == 0 && ps[0].end == n - 1;
            json!({
                "coefficient": name,
                "full_range": full,
                "periods": ps.iter().map(|p| json!({
                    "start": date_text(dates[p.start]),
                    "end": date_text(dates[p.end]),
                    "start_index": p.start,
                    "end_index": p.end,
                    "sign": if p.positive { "positive" } else { "negative" },
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    let result = json!({
        "h": h,
        "bandwidth_selection": selection,
        "level": a.level,
        "bootstrap_reps": bands.reps,
        "gamma": bands.gamma,
        "h_tilde": bands.h_tilde,
        "n_obs": n,
        "iis_removed": removed,
        "coefficients": coefficients,
    });
    w.json("tvc_significance", &result)
}

struct Explosive {
    dates: Vec<NaiveDate>,
    stats: PsyStatistics,
    cvs: Option<PsyCriticalValues>,
    cv_lag: usize,
}

fn explosive(ctx: &Ctx, a: &ExplosiveArgs, extra_level: Option<f64>) -> Result<Explosive, CliError> {
    let ts = load(&a.input, Some(std::slice::from_ref(&a.column)))?.series(&a.column)?;
    let mut y = ts.values().to_vec();
    if a.log {
        if let Some(i) = y.iter().position(|v| *v <= 0.0) {
            return Err(exuberance::Error::Domain {
                index: i,
                message: "non-positive value cannot be logged".into(),
            }
            .into());
        }
        y.iter_mut().for_each(|v| *v = v.ln());
    }
    let t = y.len();
    let r0 = match a.r0 {
        Some(r) => r,
        None if ctx.profile() => PROFILE_R0,
        None => min_window(t)?,
    };
    let lag = match (a.lag, a.per_window_bic) {
        (Some(p), _) => WindowLag::Fixed(p),
        (None, true) => WindowLag::PerWindowBic { max_lag: a.max_lag },
        (None, false) => WindowLag::FullSampleBic { max_lag: a.max_lag },
    };
    let stats = psy_statistics(&y, r0, lag)?;
    let cv_lag = stats.lag.unwrap_or(0);
    let mut levels = a.levels.clone();
    if let Some(l) = extra_level {
        if !levels.iter().any(|v| (v - l).abs() < 1e-9) {
            levels.push(l);
        }
    }
    let reps = a.reps.unwrap_or(DEFAULT_CV_REPS);
    let cache = ctx.cache();
    let draws = match a.cv.unwrap_or(CvName::Mc) {
        CvName::None => None,
        CvName::Mc => Some(mc_draws_cached(&NullDgpConfig::new(t), r0, cv_lag, reps, ctx.seed, cache.as_ref())?),
        CvName::Bootstrap => {
            let opts = SieveOptions {
                max_order: a.max_lag,
                lag: cv_lag,
            };
            Some(sieve_bootstrap_draws_cached(&y, r0, reps, ctx.seed, &opts, cache.as_ref())?)
        }
    };
    let cvs = draws.map(|d| d.critical_values(&levels)).transpose()?;
    Ok(Explosive {
        dates: ts.timestamps().to_vec(),
        stats,
        cvs,
        cv_lag,
    })
}

fn sadf(ctx: &Ctx, a: &ExplosiveArgs, w: &mut Writer) -> Result<(), CliError> {
    let e = explosive(ctx, a, None)?;
    let mut header = vec!["statistic".to_string(), "value".to_string()];
    if e.cvs.is_some() {
        header.extend(a.levels.iter().map(|l| format!("cv{l}")));
        header.extend(a.levels.iter().map(|l| format!("reject{l}")));
    }
    let mut t = Table {
        header,
        ..Table::default()
    };
    explosive_notes(&mut t, &e);
    for (name, value, cv) in [
        ("SADF", e.stats.sadf, e.cvs.as_ref().map(|c| &c.sadf)),
        ("GSADF", e.stats.gsadf, e.cvs.as_ref().map(|c| &c.gsadf)),
    ] {
        let mut row = vec![name.to_string(), num(value)];
        if let Some(cv) = cv {
            row.extend(cv.iter().map(|v| num(*v)));
            row.extend(cv.iter().map(|v| (value > *v).to_string()));
        }
        t.push(row);
    }
    w.table("sadf", &t)
}

fn explosive_notes(t: &mut Table, e: &Explosive) {
    t.note("observations", e.dates.len());
    t.note("r0", e.stats.r0);
    t.note("lag", e.stats.lag.map_or("per-window BIC".to_string(), |l| l.to_string()));
    match &e.cvs {
        Some(c) => {
            t.note("cv_method", c.method.name());
            t.note("cv_reps", c.reps);
            t.note("cv_lag", e.cv_lag);
        }
        None => t.note("cv_method", "none"),
    }
}

fn datestamp(ctx: &Ctx, a: &DatestampArgs, w: &mut Writer) -> Result<(), CliError> {
    if a.explosive.cv == Some(CvName::None) {
        return Err(CliError::Config("date-stamping needs critical values".into()));
    }
    let e = explosive(ctx, &a.explosive, Some(a.level))?;
    let cvs = e.cvs.as_ref().expect("critical values requested");
    let cv = cvs
        .bsadf_at(a.level)
        .ok_or_else(|| CliError::Config(format!("level {} not computed", a.level)))?;
    let trace = e
        .stats
        .trace()
        .with_critical_values(cv.to_vec(), a.level)?
        .with_dates(&e.dates)?;
    let min_dur = match a.min_duration {
        Some(m) => m,
        None => min_duration(e.dates.len())?,
    };
    let episodes = date_stamp(&trace, min_dur)?;

    let mut t = Table::new(&["date", "index", "statistic", "cv"]);
    explosive_notes(&mut t, &e);
    t.note("level", num(a.level));
    for (j, s) in trace.statistics.iter().enumerate() {
        let i = trace.first_index + j;
        t.push(vec![date_text(e.dates[i]), i.to_string(), num(*s), num(cv[j])]);
    }
    w.table("bsadf", &t)?;
    let gsadf_cv = cvs.gsadf_at(a.level);
    let result = json!({
        "gsadf": e.stats.gsadf,
        "gsadf_cv": gsadf_cv,
        "explosive": gsadf_cv.map(|c| e.stats.gsadf > c),
        "r0": e.stats.r0,
        "lag": e.stats.lag,
        "cv_method": cvs.method.name(),
        "cv_reps": cvs.reps,
        "level": a.level,
        "min_duration": episodes.min_duration,
        "episodes": episodes.episodes,
    });
    w.json("episodes", &result)
}

fn crashodds(ctx: &Ctx, a: &CrashoddsArgs, w: &mut Writer) -> Result<(), CliError> {
    let range: [f64; 2] = a
        .alpha_range
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Config("--alpha-range takes exactly two values".into()))?;
    let reports: Vec<CrashOddsReport> = match (a.growth_rate, &a.input) {
        (Some(g), _) => vec![CrashOddsReport::from_growth(g, range, &a.horizons)?],
        (None, None) => return Err(CliError::Config("crashodds needs --input or --growth-rate".into())),
        (None, Some(path)) => {
            let input = InputArgs {
                input: path.clone(),
                date_column: a.date_column.clone(),
                date_format: a.date_format.clone(),
            };
            let panel = load(&input, a.column.as_ref().map(std::slice::from_ref))?;
            let name = panel
                .column_names()
                .next()
                .ok_or_else(|| CliError::Config("input has no value columns".into()))?
                .to_string();
            let ts = panel.series(&name)?;
            let first = ts.timestamps()[0];
            let last = *ts.timestamps().last().expect("non-empty series");
            let windows: Vec<(NaiveDate, NaiveDate)> = match (&a.from, &a.to) {
                (None, None) if ctx.profile() => PROFILE_WINDOWS
                    .iter()
                    .map(|(f, t)| Ok((parse_date(f, "%Y-%m-%d")?, parse_date(t, "%Y-%m-%d")?)))
                    .collect::<Result<_, CliError>>()?,
                (f, t) => vec![(
                    f.as_deref().map_or(Ok(first), |s| parse_date(s, &a.date_format))?,
                    t.as_deref().map_or(Ok(last), |s| parse_date(s, &a.date_format))?,
                )],
            };
            windows
                .iter()
                .map(|&(f, t)| {
                    let fit = fit_exponential_trend(&ts, f, t)?;
                    crash_odds_report(&fit, range, &a.horizons)
                })
                .collect::<exuberance::Result<_>>()?
        }
    };
    w.json("crashodds", &reports)
}

fn simulate(ctx: &Ctx, a: &SimulateArgs, figure_a: bool, w: &mut Writer) -> Result<(), CliError> {
    if a.t == 0 {
        return Err(CliError::Config("--T must be positive".into()));
    }
    let mut t = Table::new(&["t", "value"]);
    let path = match a.model {
        ModelName::Noncausal => {
            let base = if figure_a {
                [0.95, 1.7, 1.0, 0.1, 0.5]
            } else {
                [0.9, 1.5, 1.0, 1.0, 0.0]
            };
            let rho = a.rho.unwrap_or(base[0]);
            let shocks = StableParams::new(
                a.alpha.unwrap_or(base[1]),
                a.beta.unwrap_or(base[2]),
                a.sigma.unwrap_or(base[3]),
                a.mu.unwrap_or(base[4]),
            )?;
            t.note("model", "noncausal");
            if figure_a {
                t.note("profile", "figure-a");
            }
            t.note("rho", num(rho));
            t.note("alpha", num(shocks.alpha));
            t.note("beta", num(shocks.beta));
            t.note("sigma", num(shocks.sigma));
            t.note("mu", num(shocks.mu));
            t.note("truncation", a.truncation);
            let model = NoncausalAr1::new(rho, shocks)?;
            simulate_noncausal_ar1(&model, a.t, a.truncation, ctx.seed)?
        }
        ModelName::PsyNull => {
            let dgp = NullDgpConfig {
                d: a.d,
                eta: a.eta,
                theta: a.theta,
                t: a.t,
            };
            dgp.validate()?;
            t.note("model", "psy-null");
            t.note("d", num(a.d));
            t.note("eta", num(a.eta));
            t.note("theta", num(a.theta));
            dgp.simulate(&mut master_rng(ctx.seed))
        }
    };
    for (i, v) in path.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), num(*v)]);
    }
    w.table("simulate", &t)
}

fn iis(a: &IisArgs, w: &mut Writer) -> Result<(), CliError> {
    let (dates, y, x) = regression_data(&a.input, &a.response, &a.regressors, a.returns)?;
    let opts = IisOptions {
        alpha: a.alpha,
        blocks: a.blocks,
        intercept: true,
    };
    let r = iis_outliers(&y, &x, &opts)?;
    let mut t = Table::new(&["index", "date", "value"]);
    t.note("alpha", num(a.alpha));
    t.note("blocks", a.blocks);
    t.note("critical_value", num(r.critical_value));
    t.note("observations", y.len());
    t.note("retained", r.retained.len());
    for &i in &r.retained {
        t.push(vec![i.to_string(), date_text(dates[i]), num(y[i])]);
    }
    w.table("iis", &t)
}

fn deseason(a: &DeseasonArgs, w: &mut Writer) -> Result<(), CliError> {
    let mut ts = load(&a.input, Some(std::slice::from_ref(&a.column)))?.series(&a.column)?;
    if a.weekly {
        ts = to_weekly_mean(&ts)?;
    }
    let d = fourier_deseason(&ts, a.cycles_per_year)?;
    let mut t = Table::new(&["date", "value", "deseasonalized"]);
    t.note("cycles_per_year", num(a.cycles_per_year));
    t.note("cos", num(d.cos_coef));
    t.note("sin", num(d.sin_coef));
    t.note("intercept", num(d.intercept));
    for ((date, v), r) in ts.timestamps().iter().zip(ts.values()).zip(d.residuals.values()) {
        t.push(vec![date_text(*date), num(*v), num(*r)]);
    }
    w.table("deseason", &t)
}

fn switchprice(ctx: &Ctx, a: &SwitchpriceArgs, w: &mut Writer) -> Result<(), CliError> {
    let panel = load(&a.input, Some(&[a.coal.clone(), a.gas.clone()]))?;
    let coal = panel.series(&a.coal)?;
    let gas = panel.series(&a.gas)?;
    let d = SwitchingParams::default();
    let params = SwitchingParams {
        eta_coal: a.eta_coal.unwrap_or(d.eta_coal),
        eta_gas: a.eta_gas.unwrap_or(d.eta_gas),
        f_coal: a.f_coal.unwrap_or(d.f_coal),
        f_gas: a.f_gas.unwrap_or(d.f_gas),
        coal_divisor: a.coal_divisor.unwrap_or(d.coal_divisor),
    };
    let per_tonne = a.coal_per_tonne || ctx.profile();
    let s = switching_price(&coal, &gas, &params, per_tonne)?;
    let mut t = Table::new(&["date", "switch_price"]);
    t.note("eta_coal", num(params.eta_coal));
    t.note("eta_gas", num(params.eta_gas));
    t.note("f_coal", num(params.f_coal));
    t.note("f_gas", num(params.f_gas));
    t.note("coal_per_tonne", per_tonne);
    if per_tonne {
        t.note("coal_divisor", num(params.coal_divisor));
    }
    for (date, v) in s.timestamps().iter().zip(s.values()) {
        t.push(vec![date_text(*date), num(*v)]);
    }
    w.table("switchprice", &t)
}
