//! Slow reference implementations for the test suite. Nothing here calls
//! into the solver, kernel or eigen code of the library; inputs and outputs
//! are plain vectors.

#![allow(dead_code)]

/// Row-major dense matrix.
pub type Rows = Vec<Vec<f64>>;

fn matvec(a: &Rows, x: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn tmatvec(a: &Rows, r: &[f64]) -> Vec<f64> {
    let cols = a.first().map_or(0, Vec::len);
    let mut out = vec![0.0; cols];
    for (row, ri) in a.iter().zip(r) {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v * ri;
        }
    }
    out
}

fn smooth(a: &Rows, y: &[f64], c: &[f64]) -> f64 {
    matvec(a, c).iter().zip(y).map(|(p, t)| (p - t).powi(2)).sum()
}

pub fn lasso_objective(a: &Rows, y: &[f64], c: &[f64], lambda: f64) -> f64 {
    lambda * c.iter().map(|v| v.abs()).sum::<f64>() + smooth(a, y, c)
}

pub struct ProxResult {
    pub coefficients: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Accelerated proximal gradient (FISTA with backtracking and adaptive
/// restart) on `lambda ||c||_1 + ||A c - y||^2`, no intercept. Stops when an
/// iteration moves no coordinate by more than `tol` times the largest
/// coefficient magnitude (or `tol` if all are below 1).
pub fn lasso_proximal_oracle(a: &Rows, y: &[f64], lambda: f64, tol: f64) -> ProxResult {
    const MAX_ITER: usize = 500_000;
    let n = a.first().map_or(0, Vec::len);
    let mut c = vec![0.0; n];
    let mut v = c.clone();
    let mut t = 1.0f64;
    let mut step = 1.0f64;
    for it in 1..=MAX_ITER {
        let rv: Vec<f64> = matvec(a, &v).iter().zip(y).map(|(p, q)| p - q).collect();
        let grad: Vec<f64> = tmatvec(a, &rv).iter().map(|g| 2.0 * g).collect();
        let fv: f64 = rv.iter().map(|r| r * r).sum();
        let next = loop {
            let cand: Vec<f64> = v
                .iter()
                .zip(&grad)
                .map(|(vi, gi)| {
                    let u = vi - step * gi;
                    u.signum() * (u.abs() - step * lambda).max(0.0)
                })
                .collect();
            let d: Vec<f64> = cand.iter().zip(&v).map(|(p, q)| p - q).collect();
            let bound = fv
                + d.iter().zip(&grad).map(|(p, g)| p * g).sum::<f64>()
                + d.iter().map(|p| p * p).sum::<f64>() / (2.0 * step);
            if smooth(a, y, &cand) <= bound * (1.0 + 1e-15) {
                break cand;
            }
            step *= 0.5;
        };
        let moved = next.iter().zip(&c).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let scale = next.iter().map(|v| v.abs()).fold(1.0, f64::max);
        // restart momentum when the step opposes the momentum direction
        let against: f64 = v.iter().zip(&next).zip(&c).map(|((vi, ni), ci)| (vi - ni) * (ni - ci)).sum();
        let t_next = if against > 0.0 { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
        let beta = if against > 0.0 { 0.0 } else { (t - 1.0) / t_next };
        v = next.iter().zip(&c).map(|(p, q)| p + beta * (p - q)).collect();
        c = next;
        t = t_next;
        if moved <= tol * scale {
            return ProxResult {
                objective: lasso_objective(a, y, &c, lambda),
                coefficients: c,
                iterations: it,
                converged: true,
            };
        }
    }
    ProxResult {
        objective: lasso_objective(a, y, &c, lambda),
        coefficients: c,
        iterations: MAX_ITER,
        converged: false,
    }
}

/// Eigenvalues and eigenvectors (columns) of a symmetric matrix by cyclic
/// Jacobi rotations.
pub fn jacobi_eigen(mut a: Rows) -> (Vec<f64>, Rows) {
    let n = a.len();
    let mut v: Rows = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i][i]).collect(), v)
}

fn kernel(x: &[f64], y: &[f64], theta: &[f64]) -> f64 {
    let s: f64 = x.iter().zip(y).zip(theta).map(|((a, b), t)| ((a - b) / t).powi(2)).sum();
    (-0.5 * s).exp()
}

pub struct KpcaOracle {
    pub eigenvalues: Vec<f64>,
    /// One row per query point, one column per axis.
    pub projections: Rows,
}

/// Textbook kernel PCA: explicit double-centered kernel matrix, full Jacobi
/// decomposition, axes scaled so that `lambda ||alpha||^2 = 1`, queries
/// projected through the centered cross kernel.
pub fn dense_kpca_oracle(points: &Rows, theta: &[f64], k: usize, queries: &Rows) -> KpcaOracle {
    let n = points.len();
    let nf = n as f64;
    let kmat: Rows = points.iter().map(|x| points.iter().map(|y| kernel(x, y, theta)).collect()).collect();
    let row_mean: Vec<f64> = kmat.iter().map(|r| r.iter().sum::<f64>() / nf).collect();
    let grand = row_mean.iter().sum::<f64>() / nf;
    let centered: Rows = (0..n)
        .map(|i| (0..n).map(|j| kmat[i][j] - row_mean[i] - row_mean[j] + grand).collect())
        .collect();
    let (vals, vecs) = jacobi_eigen(centered);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]));
    let top: Vec<usize> = order.into_iter().take(k).collect();
    let eigenvalues: Vec<f64> = top.iter().map(|&i| vals[i]).collect();
    let alphas: Rows = top
        .iter()
        .map(|&m| {
            let col: Vec<f64> = (0..n).map(|i| vecs[i][m]).collect();
            let norm2: f64 = col.iter().map(|v| v * v).sum();
            let s = 1.0 / (vals[m] * norm2).sqrt();
            col.iter().map(|v| v * s).collect()
        })
        .collect();
    let projections = queries
        .iter()
        .map(|x| {
            let kx: Vec<f64> = points.iter().map(|p| kernel(x, p, theta)).collect();
            let mx = kx.iter().sum::<f64>() / nf;
            let kc: Vec<f64> = (0..n).map(|i| kx[i] - mx - row_mean[i] + grand).collect();
            alphas.iter().map(|a| a.iter().zip(&kc).map(|(p, q)| p * q).sum()).collect()
        })
        .collect();
    KpcaOracle {
        eigenvalues,
        projections,
    }
}
