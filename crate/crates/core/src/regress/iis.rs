use std::collections::BTreeSet;

use nalgebra::DMatrix;

use super::{normal_two_sided_critical, ols_matrix, RegressionFit};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IisOptions {
    /// Nominal significance level of each dummy's t-test.
    pub alpha: f64,
    /// Number of contiguous saturation blocks.
    pub blocks: usize,
    /// Prepend a constant to the regressors.
    pub intercept: bool,
}

impl Default for IisOptions {
    fn default() -> Self {
        IisOptions {
            alpha: 0.005,
            blocks: 2,
            intercept: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IisResult {
    /// Observation indices whose impulse dummy is retained, ascending.
    pub retained: Vec<usize>,
    /// Final regression on the regressors plus retained dummies.
    pub fit: RegressionFit,
    /// Two-sided normal critical value used for retention.
    pub critical_value: f64,
}

/// Columns that are already unit impulses (a single entry equal to one).
fn impulse_columns(x: &DMatrix<f64>) -> Vec<(usize, usize)> {
    (0..x.ncols())
        .filter_map(|c| {
            let col = x.column(c);
            let nz: Vec<usize> = (0..col.len()).filter(|&i| col[i] != 0.0).collect();
            (nz.len() == 1 && col[nz[0]] == 1.0).then(|| (c, nz[0]))
        })
        .collect()
}

fn with_dummies(base: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    let (n, k) = base.shape();
    let mut x = base.clone().resize_horizontally(k + idx.len(), 0.0);
    for (j, &i) in idx.iter().enumerate() {
        x[(i, k + j)] = 1.0;
    }
    debug_assert_eq!(x.nrows(), n);
    x
}

/// t-ratios with the residual variance floored at a tiny multiple of the
/// response's mean square, so exact fits do not produce 0/0.
fn robust_t(fit: &RegressionFit, y_ms: f64) -> Vec<f64> {
    let s2 = fit.sigma2().max(1e-20 * y_ms.max(f64::MIN_POSITIVE));
    let inv = fit.xtx_inv();
    fit.coefficients
        .iter()
        .enumerate()
        .map(|(j, b)| b / (s2 * inv[(j, j)]).sqrt())
        .collect()
}

struct Search<'a> {
    y: &'a [f64],
    base: DMatrix<f64>,
    crit: f64,
    y_ms: f64,
    blocks: usize,
}

impl Search<'_> {
    fn fit(&self, dummies: &[usize]) -> Result<(RegressionFit, Vec<f64>)> {
        let fit = ols_matrix(self.y, with_dummies(&self.base, dummies))?;
        let t = robust_t(&fit, self.y_ms);
        Ok((fit, t))
    }

    /// Saturate the observations outside `fixed` block by block and return
    /// the significant dummies.
    fn saturate(&self, fixed: &[usize]) -> Result<BTreeSet<usize>> {
        let k = self.base.ncols() + fixed.len();
        let candidates: Vec<usize> = (0..self.y.len()).filter(|i| !fixed.contains(i)).collect();
        let mut found = BTreeSet::new();
        let per_block = candidates.len().div_ceil(self.blocks).max(1);
        for block in candidates.chunks(per_block) {
            let idx: Vec<usize> = fixed.iter().chain(block).copied().collect();
            let (_, t) = self.fit(&idx)?;
            for (j, &i) in block.iter().enumerate() {
                if t[k + j].abs() > self.crit {
                    found.insert(i);
                }
            }
        }
        Ok(found)
    }

    /// Drop the least significant of `free` until all of them pass, keeping
    /// `fixed` in the model throughout.
    fn eliminate(&self, fixed: &[usize], mut free: Vec<usize>) -> Result<Vec<usize>> {
        let k = self.base.ncols() + fixed.len();
        loop {
            let idx: Vec<usize> = fixed.iter().chain(&free).copied().collect();
            let (_, t) = self.fit(&idx)?;
            let weakest = (0..free.len())
                .map(|j| (t[k + j].abs(), j))
                .min_by(|a, b| a.0.total_cmp(&b.0));
            match weakest {
                Some((tv, j)) if tv <= self.crit => {
                    free.remove(j);
                }
                _ => return Ok(free),
            }
        }
    }

    /// One refinement pass: look for further outliers given `current`, then
    /// keep the members of `current` that stay significant.
    fn refine(&self, current: &[usize]) -> Result<Vec<usize>> {
        let found = self.saturate(current)?;
        let added = self.eliminate(current, found.into_iter().collect())?;
        let k = self.base.ncols();
        let idx: Vec<usize> = current.iter().chain(&added).copied().collect();
        let (_, t) = self.fit(&idx)?;
        let mut out: BTreeSet<usize> = added.into_iter().collect();
        for (j, &i) in current.iter().enumerate() {
            if t[k + j].abs() > self.crit {
                out.insert(i);
            }
        }
        Ok(out.into_iter().collect())
    }
}

/// Impulse indicator saturation by split-block search.
///
/// Impulse dummies for each block of observations are added in turn to the
/// regressors and those with `|t|` above the two-sided normal critical value
/// are kept. The union is then re-estimated and the least significant dummy
/// dropped until every remaining dummy is significant. The search is repeated
/// with the retained dummies in the model until the set no longer changes.
/// Columns of `x` that are already impulse dummies seed that repetition, so
/// re-running on the augmented regressors returns the same set.
pub fn iis_outliers(y: &[f64], x: &DMatrix<f64>, opts: &IisOptions) -> Result<IisResult> {
    if !(opts.alpha > 0.0 && opts.alpha < 1.0) {
        return Err(Error::invalid(format!(
            "IIS significance level {} outside (0, 1)",
            opts.alpha
        )));
    }
    if opts.blocks < 2 {
        return Err(Error::invalid("IIS needs at least two blocks"));
    }
    let n = y.len();
    if x.nrows() != n {
        return Err(Error::invalid("regressors and response differ in length"));
    }
    let full = if opts.intercept {
        x.clone().insert_column(0, 1.0)
    } else {
        x.clone()
    };
    let existing = impulse_columns(&full);
    let drop: Vec<usize> = existing.iter().map(|e| e.0).collect();
    let base = full.remove_columns_at(&drop);
    let k = base.ncols() + existing.len();
    if n <= 2 * (k + 1) {
        return Err(Error::InsufficientData {
            needed: 2 * (k + 1) + 1,
            got: n,
        });
    }
    let search = Search {
        y,
        base,
        crit: normal_two_sided_critical(opts.alpha),
        y_ms: y.iter().map(|v| v * v).sum::<f64>() / n as f64,
        blocks: opts.blocks,
    };

    let mut current: Vec<usize> = if existing.is_empty() {
        let found = search.saturate(&[])?;
        search.eliminate(&[], found.into_iter().collect())?
    } else {
        let mut s: Vec<usize> = existing.iter().map(|e| e.1).collect();
        s.sort_unstable();
        s
    };
    for _ in 0..MAX_PASSES {
        let next = search.refine(&current)?;
        if next == current {
            break;
        }
        current = next;
    }
    let (fit, _) = search.fit(&current)?;
    Ok(IisResult {
        retained: current,
        fit,
        critical_value: search.crit,
    })
}

const MAX_PASSES: usize = 25;
