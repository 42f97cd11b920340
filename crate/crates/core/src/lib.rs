//! Econometric toolkit for detecting and dating explosive price dynamics.
//!
//! Modules cover series ingestion and alignment, regression utilities,
//! unit-root and stationarity tests, recursive right-tailed ADF tests with
//! date-stamping, time-varying coefficient estimation with bootstrap bands,
//! and noncausal autoregressive simulation with crash-odds summaries.

pub mod error;
pub mod explosive;
pub mod linalg;
pub mod noncausal;
pub mod quantile;
pub mod regress;
pub mod rng;
pub mod series;
pub mod tvc;
pub mod unitroot;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/regression.md")]
    mod regression {}
    #[doc = include_str!("../../../book/src/unit-roots.md")]
    mod unit_roots {}
    #[doc = include_str!("../../../book/src/explosive.md")]
    mod explosive {}
    #[doc = include_str!("../../../book/src/tvc.md")]
    mod tvc {}
    #[doc = include_str!("../../../book/src/noncausal.md")]
    mod noncausal {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
}
