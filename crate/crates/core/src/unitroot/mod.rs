//! Stationarity battery: augmented Dickey-Fuller, Phillips-Perron, KPSS and
//! the Leybourne-Newbold-Vougas smooth-transition test.
//!
//! ADF, PP and LNV test the unit-root null against a stationary alternative
//! and reject in the left tail; KPSS tests (trend) stationarity and rejects
//! in the right tail.

mod adf;
mod kpss;
mod lnv;
mod pp;
mod tables;

use serde::{Deserialize, Serialize};

pub use adf::{adf, adf_regression, adf_statistic, AdfRegression};
pub use kpss::{kpss, kpss_with, KpssOptions};
pub use lnv::{lnv, lnv_fit, lnv_simulated_critical_values, LnvFit, LnvModel, LnvOptions};
pub use pp::{pp, pp_with, PpOptions};
pub use tables::{critical_values, CriticalValues, LEVELS};

/// Deterministic terms in the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeterministicSpec {
    None,
    Constant,
    ConstantTrend,
}

impl DeterministicSpec {
    pub fn n_terms(self) -> usize {
        match self {
            DeterministicSpec::None => 0,
            DeterministicSpec::Constant => 1,
            DeterministicSpec::ConstantTrend => 2,
        }
    }
}

/// How many lagged differences augment the test regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LagChoice {
    Fixed(usize),
    /// Minimise BIC over `0..=max_lag` on a common sample.
    Bic { max_lag: usize },
}

impl Default for LagChoice {
    fn default() -> Self {
        LagChoice::Bic { max_lag: 8 }
    }
}

/// Long-run variance bandwidth for the Bartlett kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// `floor(4 (n/100)^{2/9})`.
    #[default]
    Automatic,
    Fixed(usize),
}

impl Bandwidth {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Bandwidth::Automatic => crate::regress::newey_west_auto_lag(n),
            Bandwidth::Fixed(l) => l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TestKind {
    Adf,
    Pp,
    Kpss,
    Lnv,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::Adf => "ADF",
            TestKind::Pp => "PP",
            TestKind::Kpss => "KPSS",
            TestKind::Lnv => "LNV",
        }
    }

    /// True when large values of the statistic reject the null.
    pub fn right_tailed(self) -> bool {
        matches!(self, TestKind::Kpss)
    }
}

/// Outcome of one unit-root or stationarity test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootResult {
    pub test: TestKind,
    pub statistic: f64,
    /// Augmentation lags (ADF, LNV) or long-run variance bandwidth (PP, KPSS).
    pub lag: usize,
    pub spec: DeterministicSpec,
    pub critical_values: CriticalValues,
    /// Rejection of the null at the 90, 95 and 99% levels.
    pub reject: [bool; 3],
}

impl UnitRootResult {
    pub(crate) fn new(
        test: TestKind,
        statistic: f64,
        lag: usize,
        spec: DeterministicSpec,
        critical_values: CriticalValues,
    ) -> Self {
        let reject = critical_values.values.map(|cv| {
            if test.right_tailed() {
                statistic > cv
            } else {
                statistic < cv
            }
        });
        UnitRootResult {
            test,
            statistic,
            lag,
            spec,
            critical_values,
            reject,
        }
    }

    /// Rejection at `level` percent (90, 95 or 99).
    pub fn rejects_at(&self, level: u32) -> bool {
        LEVELS
            .iter()
            .position(|&l| l == level)
            .map(|i| self.reject[i])
            .unwrap_or(false)
    }
}
