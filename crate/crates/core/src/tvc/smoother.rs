use nalgebra::{DMatrix, DVector};

use super::{CoefficientCurves, Kernel};
use crate::error::{Error, Result};

/// One grid point: `θ(τ) = weights * y[start..start + len]`.
#[derive(Debug, Clone)]
struct Row {
    start: usize,
    /// `2k x len`; the first `k` rows give `β(τ)`, the rest `β'(τ)`.
    weights: DMatrix<f64>,
}

/// The local-linear estimator as a linear map from `y` to the coefficient
/// curves. Building it once lets bootstrap replicates reuse the weights.
#[derive(Debug, Clone)]
pub struct LocalSmoother {
    n: usize,
    k: usize,
    h: f64,
    kernel: Kernel,
    grid: Vec<f64>,
    rows: Vec<Row>,
}

impl LocalSmoother {
    pub fn new(x: &DMatrix<f64>, h: f64, kernel: Kernel, grid: &[f64]) -> Result<Self> {
        let (n, k) = x.shape();
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid(format!("bandwidth {h} must be positive")));
        }
        if k == 0 {
            return Err(Error::invalid("no regressors"));
        }
        if !(n as f64 * h > 4.0 * k as f64) {
            return Err(Error::invalid(format!(
                "n h = {} must exceed {} for {k} regressors",
                n as f64 * h,
                4 * k
            )));
        }
        if grid.is_empty()
            || grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0))
            || grid.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(Error::invalid("grid must be strictly increasing inside (0, 1]"));
        }
        let nf = n as f64;
        let rows = grid
            .iter()
            .map(|&tau| {
                let lo = ((tau - h) * nf).floor().max(1.0) as usize;
                let hi = (((tau + h) * nf).ceil() as usize).min(n);
                let support: Vec<(usize, f64, f64)> = (lo..=hi)
                    .filter_map(|t| {
                        let u = (t as f64 / nf - tau) / h;
                        let w = kernel.eval(u);
                        (w > 0.0).then_some((t - 1, u, w))
                    })
                    .collect();
                if support.len() < 2 * k {
                    return Err(singular(tau));
                }
                let start = support[0].0;
                let len = support.last().unwrap().0 - start + 1;
                let mut m = DMatrix::<f64>::zeros(2 * k, 2 * k);
                let mut zw = DMatrix::<f64>::zeros(2 * k, len);
                let mut z = DVector::<f64>::zeros(2 * k);
                for &(t, u, w) in &support {
                    for j in 0..k {
                        z[j] = x[(t, j)];
                        z[k + j] = x[(t, j)] * u;
                    }
                    m.ger(w, &z, &z, 1.0);
                    zw.column_mut(t - start).axpy(w, &z, 0.0);
                }
                let diag: Vec<f64> = (0..2 * k).map(|j| m[(j, j)]).collect();
                let chol = m.cholesky().ok_or_else(|| singular(tau))?;
                let l = chol.l_dirty();
                if (0..2 * k).any(|j| !(l[(j, j)] * l[(j, j)] > 1e-12 * diag[j])) {
                    return Err(singular(tau));
                }
                let mut weights = chol.solve(&zw);
                for r in k..2 * k {
                    weights.row_mut(r).scale_mut(1.0 / h);
                }
                Ok(Row { start, weights })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LocalSmoother {
            n,
            k,
            h,
            kernel,
            grid: grid.to_vec(),
            rows,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.h
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// `β(τ)` on the grid as a `grid x k` matrix.
    pub fn estimates(&self, y: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.grid.len(), self.k);
        self.estimates_into(y, &mut out);
        out
    }

    pub(crate) fn estimates_into(&self, y: &[f64], out: &mut DMatrix<f64>) {
        for (i, row) in self.rows.iter().enumerate() {
            let len = row.weights.ncols();
            let yw = &y[row.start..row.start + len];
            for j in 0..self.k {
                out[(i, j)] = row.weights.row(j).iter().zip(yw).map(|(a, b)| a * b).sum();
            }
        }
    }

    pub fn curves(&self, y: &[f64]) -> CoefficientCurves {
        let g = self.grid.len();
        let mut estimates = DMatrix::zeros(g, self.k);
        let mut derivatives = DMatrix::zeros(g, self.k);
        for (i, row) in self.rows.iter().enumerate() {
            let len = row.weights.ncols();
            let yw = DVector::from_column_slice(&y[row.start..row.start + len]);
            let theta = &row.weights * yw;
            for j in 0..self.k {
                estimates[(i, j)] = theta[j];
                derivatives[(i, j)] = theta[self.k + j];
            }
        }
        CoefficientCurves {
            grid: self.grid.clone(),
            estimates,
            derivatives,
            bandwidth: self.h,
            kernel: self.kernel,
            boundary: self
                .grid
                .iter()
                .map(|&t| t < self.h || t > 1.0 - self.h)
                .collect(),
        }
    }

    /// Diagonal of the hat matrix `ŷ = H y` when the grid is the sample
    /// points `t/n`.
    pub fn hat_diagonal(&self, x: &DMatrix<f64>) -> Result<Vec<f64>> {
        if self.grid.len() != self.n {
            return Err(Error::invalid("hat matrix needs the sample grid"));
        }
        Ok(self
            .rows
            .iter()
            .enumerate()
            .map(|(t, row)| {
                let c = t - row.start;
                (0..self.k).map(|j| x[(t, j)] * row.weights[(j, c)]).sum()
            })
            .collect())
    }
}

fn singular(tau: f64) -> Error {
    Error::SingularDesign(format!("local design singular at tau = {tau}"))
}
