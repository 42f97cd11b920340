//! Recursive right-tailed ADF tests for explosive behaviour: SADF, GSADF and
//! the backward SADF sequence used to date-stamp episodes, together with
//! simulated and sieve-bootstrap critical values.
//!
//! Windows are indexed by observation: `[r1, r2]` covers levels
//! `y[r1..=r2]`, and the minimum window `r0` requires `r2 - r1 >= r0`.

mod critical;
mod datestamp;
mod scan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regress::bic_lag_select;
use crate::unitroot::DeterministicSpec;

pub use critical::{
    mc_critical_values, mc_draws, mc_draws_cached, sieve_bootstrap_cvs, sieve_bootstrap_draws,
    sieve_bootstrap_draws_cached, CvCache, CvMethod, NullDgpConfig, PsyCriticalValues,
    SieveOptions, SimulationDraws, MIN_REPS,
};
pub use datestamp::{date_stamp, BsadfTrace, Episode, EpisodeSet};
pub use scan::{adf_window, bsadf_sequence, gsadf, psy_statistics, sadf, PsyStatistics};

/// Smallest admissible minimum window.
pub const MIN_WINDOW: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    /// Minimum window as an observation count.
    pub r0: usize,
    /// Sample size.
    pub t: usize,
}

impl WindowConfig {
    pub fn new(r0: usize, t: usize) -> Result<Self> {
        if r0 < MIN_WINDOW || r0 > t {
            return Err(Error::invalid(format!(
                "minimum window {r0} outside [{MIN_WINDOW}, {t}]"
            )));
        }
        Ok(WindowConfig { r0, t })
    }
}

/// How the minimum window is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinWindow {
    /// `floor(T (0.01 + 1.8 / sqrt(T)))`.
    #[default]
    Rule,
    Observations(usize),
}

/// Minimum window from the PSY rule `floor(T (0.01 + 1.8/sqrt T))`.
///
/// ```
/// use exuberance::explosive::min_window;
/// assert_eq!(min_window(538).unwrap(), 47);
/// assert_eq!(min_window(10_000).unwrap(), 280);
/// ```
pub fn min_window(t: usize) -> Result<usize> {
    min_window_with(t, MinWindow::Rule)
}

pub fn min_window_with(t: usize, choice: MinWindow) -> Result<usize> {
    if t < 30 {
        return Err(Error::InsufficientData { needed: 30, got: t });
    }
    let r0 = match choice {
        MinWindow::Rule => {
            let tf = t as f64;
            // The nudge keeps exact products such as 10000 * 0.028 from
            // flooring one below.
            (tf * (0.01 + 1.8 / tf.sqrt()) + 1e-9).floor() as usize
        }
        MinWindow::Observations(n) => n,
    };
    WindowConfig::new(r0, t).map(|w| w.r0)
}

/// Minimum episode length `ceil(ln T)`.
pub fn min_duration(t: usize) -> Result<usize> {
    if t < 3 {
        return Err(Error::InsufficientData { needed: 3, got: t });
    }
    Ok((t as f64).ln().ceil() as usize)
}

/// Lag order of the ADF regression inside each window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowLag {
    Fixed(usize),
    /// One lag for every window, chosen by BIC on the full sample.
    FullSampleBic { max_lag: usize },
    /// BIC separately in each window. Much slower.
    PerWindowBic { max_lag: usize },
}

impl Default for WindowLag {
    fn default() -> Self {
        WindowLag::FullSampleBic { max_lag: 8 }
    }
}

impl WindowLag {
    /// The fixed lag this choice implies for `y`, or `None` for per-window
    /// selection.
    pub fn resolve(self, y: &[f64]) -> Result<Option<usize>> {
        match self {
            WindowLag::Fixed(p) => Ok(Some(p)),
            WindowLag::FullSampleBic { max_lag } => {
                bic_lag_select(y, max_lag, DeterministicSpec::Constant).map(Some)
            }
            WindowLag::PerWindowBic { .. } => Ok(None),
        }
    }
}
