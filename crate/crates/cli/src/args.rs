use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "exuberance", version, about = "Explosive-episode detection, time-varying coefficients and crash odds")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Master seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Key-value file with default flag values; command-line flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Reference-analysis defaults: r0 = 40, h = 0.09 after IIS, fixed trend windows.
    #[arg(long, global = true)]
    pub paper_profile: bool,
    /// Never read or write simulated critical values on disk.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Critical-value cache directory; defaults to `<out>/cv-cache`.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load, align and optionally transform a CSV panel.
    Ingest(IngestArgs),
    /// ADF, PP, KPSS and LNV on levels and log returns.
    Unitroot(UnitrootArgs),
    /// Time-varying coefficient regression with bootstrap bands.
    Tvc(TvcArgs),
    /// SADF and GSADF statistics with critical values.
    Sadf(ExplosiveArgs),
    /// BSADF trace and explosive episodes.
    Datestamp(DatestampArgs),
    /// Exponential trend fit and crash odds.
    Crashodds(CrashoddsArgs),
    /// Simulated paths.
    Simulate(SimulateArgs),
    /// Impulse indicator saturation.
    Iis(IisArgs),
    /// Remove an annual Fourier cycle.
    Deseason(DeseasonArgs),
    /// Coal-to-gas switching price.
    Switchprice(SwitchpriceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Input CSV file.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, default_value = "date")]
    pub date_column: String,
    #[arg(long, default_value = "%Y-%m-%d")]
    pub date_format: String,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Columns to keep (all when omitted).
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    /// Average daily data within ISO weeks.
    #[arg(long)]
    pub weekly: bool,
    /// Replace levels by log returns.
    #[arg(long)]
    pub returns: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestName {
    Adf,
    Pp,
    Kpss,
    Lnv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecName {
    None,
    Constant,
    Trend,
}

#[derive(Debug, Args)]
pub struct UnitrootArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Columns to test (all when omitted).
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',', value_enum)]
    pub tests: Option<Vec<TestName>>,
    /// Deterministic terms of the test regressions.
    #[arg(long, value_enum, default_value = "trend")]
    pub spec: SpecName,
    /// Largest lag considered by BIC.
    #[arg(long, default_value_t = 8)]
    pub max_lag: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BandwidthName {
    Cv,
    Gcv,
    Mcv,
    Aic,
}

#[derive(Debug, Args)]
pub struct TvcArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub response: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub regressors: Vec<String>,
    /// Use log returns of every column instead of levels.
    #[arg(long)]
    pub returns: bool,
    /// Omit the time-varying intercept.
    #[arg(long)]
    pub no_intercept: bool,
    /// Fixed bandwidth; skips selection.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, value_enum, default_value = "mcv")]
    pub bandwidth_method: BandwidthName,
    /// Half-width `l` of the modified cross-validation.
    #[arg(long, default_value_t = 4)]
    pub mcv_l: usize,
    /// Candidate bandwidths for selection.
    #[arg(long, value_delimiter = ',')]
    pub h_grid: Option<Vec<f64>>,
    /// Drop outliers found by impulse indicator saturation first.
    #[arg(long)]
    pub iis: bool,
    #[arg(long, default_value_t = 0.005)]
    pub iis_alpha: f64,
    #[arg(long)]
    pub bootstrap_reps: Option<usize>,
    /// AR parameter of the bootstrap multipliers.
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, default_value_t = 95.0)]
    pub level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CvName {
    Mc,
    Bootstrap,
    None,
}

#[derive(Debug, Clone, Args)]
pub struct ExplosiveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub column: String,
    /// Take logs before testing.
    #[arg(long)]
    pub log: bool,
    /// Minimum window in observations (rule of thumb when omitted).
    #[arg(long)]
    pub r0: Option<usize>,
    /// Fixed ADF lag in every window.
    #[arg(long, conflicts_with = "per_window_bic")]
    pub lag: Option<usize>,
    /// Largest lag for BIC selection.
    #[arg(long, default_value_t = 8)]
    pub max_lag: usize,
    /// Select the lag by BIC in every window instead of once.
    #[arg(long)]
    pub per_window_bic: bool,
    #[arg(long, value_enum)]
    pub cv: Option<CvName>,
    /// Replications for critical values.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Critical-value levels in percent.
    #[arg(long, value_delimiter = ',', default_values_t = vec![90.0, 95.0, 99.0])]
    pub levels: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct DatestampArgs {
    #[command(flatten)]
    pub explosive: ExplosiveArgs,
    /// Level whose critical values stamp the episodes.
    #[arg(long, default_value_t = 95.0)]
    pub level: f64,
    /// Minimum episode length (`ceil(ln T)` when omitted).
    #[arg(long)]
    pub min_duration: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CrashoddsArgs {
    /// Price CSV; omit to use `--growth-rate` directly.
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value = "date")]
    pub date_column: String,
    #[arg(long, default_value = "%Y-%m-%d")]
    pub date_format: String,
    #[arg(long)]
    pub column: Option<String>,
    /// First date of the trend window.
    #[arg(long)]
    pub from: Option<String>,
    /// Last date of the trend window.
    #[arg(long)]
    pub to: Option<String>,
    /// Monthly growth rate, instead of fitting a trend.
    #[arg(long, conflicts_with = "input")]
    pub growth_rate: Option<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 2.0])]
    pub alpha_range: Vec<f64>,
    /// Horizons in months.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1.0, 3.0, 6.0, 12.0])]
    pub horizons: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelName {
    Noncausal,
    PsyNull,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "noncausal")]
    pub model: ModelName,
    /// Path length.
    #[arg(long = "T", default_value_t = 1000)]
    pub t: usize,
    /// Demonstration path: rho 0.95, alpha 1.7, beta 1, sigma 0.1, mu 0.5.
    #[arg(long)]
    pub figure_a: bool,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
    /// Extra future shocks of the truncated moving average.
    #[arg(long, default_value_t = 500)]
    pub truncation: usize,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub theta: f64,
}

#[derive(Debug, Args)]
pub struct IisArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub response: String,
    #[arg(long, value_delimiter = ',')]
    pub regressors: Vec<String>,
    #[arg(long)]
    pub returns: bool,
    #[arg(long, default_value_t = 0.005)]
    pub alpha: f64,
    #[arg(long, default_value_t = 2)]
    pub blocks: usize,
}

#[derive(Debug, Args)]
pub struct DeseasonArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub column: String,
    #[arg(long, default_value_t = 1.0)]
    pub cycles_per_year: f64,
    /// Average daily data within ISO weeks first.
    #[arg(long)]
    pub weekly: bool,
}

#[derive(Debug, Args)]
pub struct SwitchpriceArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub coal: String,
    #[arg(long)]
    pub gas: String,
    /// Coal is quoted per tonne and is divided by `--coal-divisor`.
    #[arg(long)]
    pub coal_per_tonne: bool,
    #[arg(long)]
    pub eta_coal: Option<f64>,
    #[arg(long)]
    pub eta_gas: Option<f64>,
    #[arg(long)]
    pub f_coal: Option<f64>,
    #[arg(long)]
    pub f_gas: Option<f64>,
    #[arg(long)]
    pub coal_divisor: Option<f64>,
}
