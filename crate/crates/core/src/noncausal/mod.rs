//! Noncausal AR(1) processes with stable shocks, and the crash-odds
//! calculus for exponential bubbles.
//!
//! Conditional on a high level, a bubble of the noncausal AR(1)
//! `X_t = ρ X_{t+1} + ε_t` with tail index `α` keeps growing at rate `1/ρ`
//! for `h` more periods with probability `ρ^{αh}`, whatever the level.
//!
//! ```
//! use exuberance::noncausal::CrashOddsReport;
//!
//! let r = CrashOddsReport::from_growth(0.081, [0.5, 2.0], &[1.0, 12.0]).unwrap();
//! assert!((r.rho - 0.922).abs() < 1e-3);
//! assert!((r.horizons[1].odds.upper - 0.86).abs() < 0.01);
//! ```

mod odds;
mod process;
mod stable;

pub use odds::{
    crash_odds, crash_odds_report, expected_duration, fit_exponential_trend, half_life, rho_from_growth, Bounds,
    CrashOddsReport, HorizonOdds, TrendFit, DAYS_PER_MONTH, MIN_TREND_OBS,
};
pub use process::{
    bubble_survival, simulate_noncausal_ar1, NoncausalAr1, SurvivalStats, DEFAULT_TRUNCATION, DEMO_SEED,
};
pub use stable::{hill_estimator, stable_sample, StableParams};
