//! Penalized least squares on a random feature matrix.
//!
//! Both solvers minimize the objective in the original coordinates of `A`:
//! `lambda * ||c||_1 + ||A c + b - y||^2` (LASSO) and
//! `lambda * ||c||_2^2 + ||A c + b - y||^2` (ridge), where the intercept `b`
//! is unpenalized. Centering and column standardization are numerical
//! reparameterizations and never change the minimizer.

mod lasso;
mod ridge;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lasso::solve_lasso;
pub use ridge::solve_ridge;

/// Centered columns with a standard deviation below this are treated as
/// constant and receive a zero coefficient when standardizing.
pub(crate) const DEGENERATE_SCALE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub lambda: f64,
    /// Stopping tolerance on the largest coefficient change in one sweep.
    pub tol: f64,
    pub max_iter: usize,
    pub standardize: bool,
    pub fit_intercept: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda: 0.0,
            tol: 1e-6,
            max_iter: 1000,
            standardize: true,
            fit_intercept: true,
        }
    }
}

impl SolverConfig {
    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda must be finite and nonnegative"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("tol must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub coefficients: DVector<f64>,
    pub intercept: f64,
    pub objective: f64,
    /// Sweeps for coordinate descent, 1 for direct solves.
    pub n_iter: usize,
    pub converged: bool,
    pub nnz: usize,
    /// Objective after each coordinate-descent sweep (empty for direct solves).
    pub objective_history: Vec<f64>,
}

/// How a regularization weight is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularization {
    /// Use this value as-is.
    Fixed(f64),
    /// Scale a data-dependent reference value: [`lasso_lambda_max`] for the
    /// LASSO and [`ridge_lambda_scale`] for ridge.
    Relative(f64),
}

/// Smallest LASSO weight for which the zero vector is optimal:
/// `2 * ||A_c^T (y - mean(y))||_inf` with `A_c` the (optionally) centered matrix.
pub fn lasso_lambda_max(a: &DMatrix<f64>, y: &DVector<f64>, fit_intercept: bool) -> f64 {
    let m = a.nrows();
    let y_mean = if fit_intercept { y.mean() } else { 0.0 };
    let mut best = 0.0f64;
    for col in a.column_iter() {
        let col_mean = if fit_intercept { col.mean() } else { 0.0 };
        let mut dot = 0.0;
        for i in 0..m {
            dot += (col[i] - col_mean) * (y[i] - y_mean);
        }
        best = best.max(dot.abs());
    }
    2.0 * best
}

/// Mean squared norm of the (optionally centered) columns: the average
/// diagonal entry of `A_c^T A_c`.
pub fn ridge_lambda_scale(a: &DMatrix<f64>, fit_intercept: bool) -> f64 {
    if a.ncols() == 0 {
        return 0.0;
    }
    let total: f64 = a
        .column_iter()
        .map(|col| {
            let mean = if fit_intercept { col.mean() } else { 0.0 };
            col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        })
        .sum();
    total / a.ncols() as f64
}

impl Regularization {
    pub fn resolve_lasso(self, a: &DMatrix<f64>, y: &DVector<f64>, fit_intercept: bool) -> f64 {
        match self {
            Regularization::Fixed(v) => v,
            Regularization::Relative(r) => r * lasso_lambda_max(a, y, fit_intercept),
        }
    }

    pub fn resolve_ridge(self, a: &DMatrix<f64>, fit_intercept: bool) -> f64 {
        match self {
            Regularization::Fixed(v) => v,
            Regularization::Relative(r) => r * ridge_lambda_scale(a, fit_intercept),
        }
    }
}

/// Transformed design: kept columns, centered and optionally scaled.
pub(crate) struct Design {
    /// `m x k` matrix of transformed kept columns.
    pub z: DMatrix<f64>,
    /// Original column index of each kept column.
    pub kept: Vec<usize>,
    pub col_mean: Vec<f64>,
    /// Divisor applied to each kept column (1 when not standardizing).
    pub scale: Vec<f64>,
    pub y: DVector<f64>,
    pub y_mean: f64,
    pub n_cols: usize,
}

impl Design {
    pub fn new(a: &DMatrix<f64>, y: &DVector<f64>, cfg: &SolverConfig, scale_columns: bool) -> Result<Self> {
        cfg.validate()?;
        if a.nrows() == 0 || a.ncols() == 0 {
            return Err(Error::invalid("design matrix must be nonempty"));
        }
        if a.nrows() != y.len() {
            return Err(Error::LengthMismatch {
                expected: a.nrows(),
                found: y.len(),
            });
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("design matrix"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("response vector"));
        }
        let m = a.nrows();
        let y_mean = if cfg.fit_intercept { y.mean() } else { 0.0 };
        let yc = y.map(|v| v - y_mean);

        let mut kept = Vec::with_capacity(a.ncols());
        let mut col_mean = Vec::with_capacity(a.ncols());
        let mut scale = Vec::with_capacity(a.ncols());
        for (j, col) in a.column_iter().enumerate() {
            let mean = if cfg.fit_intercept { col.mean() } else { 0.0 };
            if cfg.standardize {
                let sd = (col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / m as f64).sqrt();
                if sd <= DEGENERATE_SCALE {
                    continue;
                }
                scale.push(if scale_columns { sd } else { 1.0 });
            } else {
                scale.push(1.0);
            }
            kept.push(j);
            col_mean.push(mean);
        }
        let mut z = DMatrix::<f64>::zeros(m, kept.len());
        for (t, &j) in kept.iter().enumerate() {
            let (mean, s) = (col_mean[t], scale[t]);
            for (dst, src) in z.column_mut(t).iter_mut().zip(a.column(j).iter()) {
                *dst = (src - mean) / s;
            }
        }
        Ok(Self {
            z,
            kept,
            col_mean,
            scale,
            y: yc,
            y_mean,
            n_cols: a.ncols(),
        })
    }

    /// Map solution `w` in transformed coordinates back to `(c, intercept)`.
    pub fn unpack(&self, w: &[f64]) -> (DVector<f64>, f64) {
        let mut c = DVector::zeros(self.n_cols);
        let mut shift = 0.0;
        for (t, &j) in self.kept.iter().enumerate() {
            let cj = w[t] / self.scale[t];
            c[j] = cj;
            shift += cj * self.col_mean[t];
        }
        (c, self.y_mean - shift)
    }
}

/// `||A c + b - y||^2`.
pub(crate) fn residual_sq(a: &DMatrix<f64>, y: &DVector<f64>, c: &DVector<f64>, b: f64) -> f64 {
    let mut fitted = DVector::from_element(a.nrows(), b);
    fitted.gemv(1.0, a, c, 1.0);
    fitted.iter().zip(y.iter()).map(|(f, t)| (f - t) * (f - t)).sum()
}

/// LASSO objective in the original coordinates.
pub fn lasso_objective(a: &DMatrix<f64>, y: &DVector<f64>, c: &DVector<f64>, intercept: f64, lambda: f64) -> f64 {
    lambda * c.iter().map(|v| v.abs()).sum::<f64>() + residual_sq(a, y, c, intercept)
}

/// Ridge objective in the original coordinates.
pub fn ridge_objective(a: &DMatrix<f64>, y: &DVector<f64>, c: &DVector<f64>, intercept: f64, lambda: f64) -> f64 {
    lambda * c.norm_squared() + residual_sq(a, y, c, intercept)
}

pub(crate) fn count_nonzero(c: &DVector<f64>) -> usize {
    c.iter().filter(|v| **v != 0.0).count()
}
