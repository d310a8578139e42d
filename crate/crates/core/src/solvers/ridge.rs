//! Ridge regression through the normal equations.

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{count_nonzero, ridge_objective, Design, FitResult, SolverConfig};
use crate::error::{Error, Result};

/// Smallest accepted Cholesky pivot relative to the largest one.
const PIVOT_TOL: f64 = 1e-13;

fn factor(g: DMatrix<f64>) -> Result<Cholesky<f64, nalgebra::Dyn>> {
    let max_diag = g.diagonal().iter().cloned().fold(0.0f64, f64::max);
    let chol = Cholesky::new(g).ok_or(Error::SingularSystem)?;
    let min_pivot = chol
        .l_dirty()
        .diagonal()
        .iter()
        .map(|v| v * v)
        .fold(f64::INFINITY, f64::min);
    if !(min_pivot > PIVOT_TOL * max_diag) {
        return Err(Error::SingularSystem);
    }
    Ok(chol)
}

/// Minimize `lambda * ||c||_2^2 + ||A c + b - y||^2`.
///
/// Solves `(A^T A + lambda I) c = A^T y` on the centered design. When the
/// matrix is wider than tall the equivalent `m x m` system
/// `(A A^T + lambda I) beta = y`, `c = A^T beta` is factored instead.
pub fn solve_ridge(a: &DMatrix<f64>, y: &DVector<f64>, cfg: &SolverConfig) -> Result<FitResult> {
    let d = Design::new(a, y, cfg, false)?;
    let (m, k) = d.z.shape();
    let w: DVector<f64> = if k == 0 {
        DVector::zeros(0)
    } else if k <= m {
        let mut g = d.z.tr_mul(&d.z);
        for i in 0..k {
            g[(i, i)] += cfg.lambda;
        }
        let rhs = d.z.tr_mul(&d.y);
        factor(g)?.solve(&rhs)
    } else {
        let zt = d.z.transpose();
        let mut g = &d.z * &zt;
        for i in 0..m {
            g[(i, i)] += cfg.lambda;
        }
        let beta = factor(g)?.solve(&d.y);
        &zt * beta
    };
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let (coefficients, intercept) = d.unpack(w.as_slice());
    let objective = ridge_objective(a, y, &coefficients, intercept, cfg.lambda);
    let nnz = count_nonzero(&coefficients);
    Ok(FitResult {
        coefficients,
        intercept,
        objective,
        n_iter: 1,
        converged: true,
        nnz,
        objective_history: Vec::new(),
    })
}
