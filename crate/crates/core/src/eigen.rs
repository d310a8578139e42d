//! Leading eigenpairs of dense symmetric matrices.
//!
//! Small matrices use a full symmetric eigendecomposition. Larger ones use
//! Lanczos iteration with full reorthogonalization, extended until the
//! requested Ritz pairs meet a residual bound (or the Krylov space spans the
//! whole matrix, at which point the result is exact).

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::rng;

/// Matrices at or below this order are decomposed densely.
pub const DENSE_LIMIT: usize = 128;

/// Residual bound `||K y - theta y|| <= RESIDUAL_TOL * |theta_1|` for Ritz pairs.
const RESIDUAL_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Descending.
    pub values: Vec<f64>,
    /// Unit-norm eigenvectors as columns, aligned with `values`.
    pub vectors: DMatrix<f64>,
}

/// The `k` largest (algebraic) eigenpairs of symmetric `a`.
pub fn top_eigenpairs(a: &DMatrix<f64>, k: usize) -> EigenPairs {
    let n = a.nrows();
    let k = k.min(n);
    if n <= DENSE_LIMIT {
        dense_top(a, k)
    } else {
        lanczos_top(a, k)
    }
}

pub fn dense_top(a: &DMatrix<f64>, k: usize) -> EigenPairs {
    let eig = SymmetricEigen::new(a.clone());
    let mut order: Vec<usize> = (0..a.nrows()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    order.truncate(k);
    EigenPairs {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: DMatrix::from_columns(
            &order.iter().map(|&i| eig.eigenvectors.column(i).into_owned()).collect::<Vec<_>>(),
        ),
    }
}

pub fn lanczos_top(a: &DMatrix<f64>, k: usize) -> EigenPairs {
    let n = a.nrows();
    let k = k.min(n);
    let mut start_rng = rng::seeded(0x1a2c_2005);
    let mut v = DVector::from_fn(n, |_, _| start_rng.random_range(-1.0..1.0));
    v /= v.norm();

    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n.min(4 * k + 64));
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut next_check = (2 * k + 20).max(40).min(n);
    let mut w = DVector::zeros(n);

    loop {
        basis.push(v.clone());
        w.gemv(1.0, a, &v, 0.0);
        let a_j = w.dot(&v);
        alpha.push(a_j);
        // full reorthogonalization, applied twice for stability
        for _ in 0..2 {
            for q in &basis {
                let h = w.dot(q);
                w.axpy(-h, q, 1.0);
            }
        }
        let b_j = w.norm();
        let steps = basis.len();
        let exhausted = steps == n || b_j <= f64::EPSILON * alpha[0].abs().max(1.0) * n as f64;

        if steps >= next_check || exhausted {
            let t = tridiagonal(&alpha, &beta);
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..steps).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
            let scale = eig.eigenvalues[order[0]].abs().max(f64::MIN_POSITIVE);
            let want = k.min(steps);
            let done = exhausted
                || order[..want]
                    .iter()
                    .all(|&i| (b_j * eig.eigenvectors[(steps - 1, i)]).abs() <= RESIDUAL_TOL * scale);
            if done {
                let mut vectors = DMatrix::zeros(n, want);
                for (c, &i) in order[..want].iter().enumerate() {
                    let mut col = vectors.column_mut(c);
                    for (s, q) in basis.iter().enumerate() {
                        col.axpy(eig.eigenvectors[(s, i)], q, 1.0);
                    }
                    let norm = col.norm();
                    col /= norm;
                }
                return EigenPairs {
                    values: order[..want].iter().map(|&i| eig.eigenvalues[i]).collect(),
                    vectors,
                };
            }
            next_check = (steps + 20).min(n);
        }
        beta.push(b_j);
        v = &w / b_j;
    }
}

fn tridiagonal(alpha: &[f64], beta: &[f64]) -> DMatrix<f64> {
    let m = alpha.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    t
}
