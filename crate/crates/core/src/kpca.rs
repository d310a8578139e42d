//! Kernel principal component analysis with a nonisotropic Gaussian kernel.
//!
//! The fitted map sends `x` to its coordinates along the `k` leading
//! principal axes of the (centered) feature-space covariance of the training
//! points. Axes are represented by coefficient vectors `alpha^m` over the
//! training points, normalized so that `lambda_m * ||alpha^m||^2 = 1`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::eigen;
use crate::error::{Error, Result};

pub const THETA_MIN: f64 = 1e-3;
pub const THETA_MAX: f64 = 1e3;

/// Eigenpairs at or below `EIGEN_FLOOR * lambda_max` are discarded.
pub const EIGEN_FLOOR: f64 = 1e-10;

/// Per-coordinate kernel bandwidths, clamped to `[THETA_MIN, THETA_MAX]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelParams {
    theta: Vec<f64>,
}

impl KernelParams {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("kernel bandwidth vector is empty"));
        }
        if theta.iter().any(|t| t.is_nan()) {
            return Err(Error::NonFinite("kernel bandwidths"));
        }
        Ok(Self {
            theta: theta.into_iter().map(|t| t.clamp(THETA_MIN, THETA_MAX)).collect(),
        })
    }

    pub fn isotropic(dim: usize, theta: f64) -> Result<Self> {
        Self::new(vec![theta; dim])
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    fn scale(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.theta).map(|(v, t)| v / t).collect()
    }
}

/// `exp(-1/2 * sum_i (x_i - y_i)^2 / theta_i^2)`.
pub fn gaussian_kernel(x: &[f64], y: &[f64], params: &KernelParams) -> Result<f64> {
    let d = params.dim();
    for v in [x, y] {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
    }
    let s: f64 = x
        .iter()
        .zip(y)
        .zip(&params.theta)
        .map(|((a, b), t)| {
            let u = (a - b) / t;
            u * u
        })
        .sum();
    Ok((-0.5 * s).exp())
}

#[inline]
fn scaled_kernel(a: &[f64], b: &[f64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
    (-0.5 * s).exp()
}

/// Kernel matrix between `rows` and `cols`, both already divided by theta.
fn cross_kernel(rows: &[Vec<f64>], cols: &[Vec<f64>]) -> DMatrix<f64> {
    let n = rows.len();
    let mut k = DMatrix::zeros(n, cols.len());
    if n == 0 {
        return k;
    }
    k.as_mut_slice()
        .par_chunks_mut(n)
        .zip(cols.par_iter())
        .for_each(|(col, c)| {
            for (out, r) in col.iter_mut().zip(rows) {
                *out = scaled_kernel(r, c);
            }
        });
    k
}

fn gram(points: &[Vec<f64>]) -> DMatrix<f64> {
    let n = points.len();
    let mut k = DMatrix::zeros(n, n);
    k.as_mut_slice()
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(j, col)| {
            for (i, out) in col.iter_mut().enumerate().take(j + 1) {
                *out = scaled_kernel(&points[i], &points[j]);
            }
        });
    k.fill_lower_triangle_with_upper_triangle();
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KpcaOptions {
    /// Double-center the kernel matrix (standard KPCA). With `false` the raw
    /// kernel matrix is decomposed and projected.
    pub center: bool,
}

impl Default for KpcaOptions {
    fn default() -> Self {
        Self { center: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KpcaModel {
    training_points: Vec<Vec<f64>>,
    params: KernelParams,
    center: bool,
    /// `N x k`, one column per principal axis.
    alphas: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    row_means: Vec<f64>,
    grand_mean: f64,
    /// Set when fewer than the requested number of axes survived the floor.
    requested_k: usize,
}

impl KpcaModel {
    /// Rebuild a model from persisted parts.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        training_points: Vec<Vec<f64>>,
        params: KernelParams,
        center: bool,
        alphas: DMatrix<f64>,
        eigenvalues: Vec<f64>,
        row_means: Vec<f64>,
        grand_mean: f64,
        requested_k: usize,
    ) -> Result<Self> {
        let n = training_points.len();
        if alphas.nrows() != n || row_means.len() != n || alphas.ncols() != eigenvalues.len() {
            return Err(Error::invalid("inconsistent KPCA model shapes"));
        }
        if training_points.iter().any(|p| p.len() != params.dim()) {
            return Err(Error::invalid("training point dimension differs from kernel dimension"));
        }
        Ok(Self {
            training_points,
            params,
            center,
            alphas,
            eigenvalues,
            row_means,
            grand_mean,
            requested_k,
        })
    }

    pub fn k(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn requested_k(&self) -> usize {
        self.requested_k
    }

    /// `true` when fewer axes than requested survived the eigenvalue floor.
    pub fn truncated(&self) -> bool {
        self.k() < self.requested_k
    }

    pub fn input_dim(&self) -> usize {
        self.params.dim()
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    pub fn centered(&self) -> bool {
        self.center
    }

    pub fn training_points(&self) -> &[Vec<f64>] {
        &self.training_points
    }

    pub fn alphas(&self) -> &DMatrix<f64> {
        &self.alphas
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn row_means(&self) -> &[f64] {
        &self.row_means
    }

    pub fn grand_mean(&self) -> f64 {
        self.grand_mean
    }

    /// Coordinates of the training points implied by the eigendecomposition:
    /// `z_i^m = lambda_m * alpha_i^m`.
    pub fn fitted_coordinates(&self) -> Vec<Vec<f64>> {
        (0..self.training_points.len())
            .map(|i| {
                (0..self.k())
                    .map(|m| self.eigenvalues[m] * self.alphas[(i, m)])
                    .collect()
            })
            .collect()
    }
}

pub fn fit_kpca(points: &[Vec<f64>], params: &KernelParams, k: usize) -> Result<KpcaModel> {
    fit_kpca_with(points, params, k, KpcaOptions::default())
}

pub fn fit_kpca_with(
    points: &[Vec<f64>],
    params: &KernelParams,
    k: usize,
    options: KpcaOptions,
) -> Result<KpcaModel> {
    let n = points.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            requested: 2,
            available: n,
        });
    }
    if k == 0 || k > n {
        return Err(Error::invalid(format!("latent dimension {k} must lie in 1..={n}")));
    }
    if let Some(p) = points.iter().find(|p| p.len() != params.dim()) {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            found: p.len(),
        });
    }
    let scaled: Vec<Vec<f64>> = points.iter().map(|p| params.scale(p)).collect();
    let mut kmat = gram(&scaled);

    let (row_means, grand_mean) = if options.center {
        let means: Vec<f64> = kmat.column_iter().map(|c| c.mean()).collect();
        let grand = means.iter().sum::<f64>() / n as f64;
        for j in 0..n {
            for i in 0..n {
                kmat[(i, j)] += grand - means[i] - means[j];
            }
        }
        (means, grand)
    } else {
        (vec![0.0; n], 0.0)
    };

    let eig = eigen::top_eigenpairs(&kmat, k);
    let top = eig.values.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(Error::DegenerateKernel);
    }
    let floor = EIGEN_FLOOR * top;
    let kept: Vec<usize> = (0..eig.values.len()).filter(|&m| eig.values[m] > floor).collect();

    let mut alphas = DMatrix::zeros(n, kept.len());
    let mut eigenvalues = Vec::with_capacity(kept.len());
    for (c, &m) in kept.iter().enumerate() {
        let lambda = eig.values[m];
        let mut col = eig.vectors.column(m) / lambda.sqrt();
        let pivot = col.iter().cloned().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if pivot < 0.0 {
            col.neg_mut();
        }
        alphas.set_column(c, &col);
        eigenvalues.push(lambda);
    }

    Ok(KpcaModel {
        training_points: points.to_vec(),
        params: params.clone(),
        center: options.center,
        alphas,
        eigenvalues,
        row_means,
        grand_mean,
        requested_k: k,
    })
}

/// Project arbitrary points onto the fitted principal axes.
pub fn project(model: &KpcaModel, points: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let d = model.input_dim();
    if let Some(p) = points.iter().find(|p| p.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.len(),
        });
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let train: Vec<Vec<f64>> = model.training_points.iter().map(|p| model.params.scale(p)).collect();
    let query: Vec<Vec<f64>> = points.iter().map(|p| model.params.scale(p)).collect();
    let mut kx = cross_kernel(&query, &train);
    if model.center {
        let n = train.len();
        let query_means: Vec<f64> = kx.row_iter().map(|r| r.sum() / n as f64).collect();
        for j in 0..n {
            let shift = model.grand_mean - model.row_means[j];
            for (i, qm) in query_means.iter().enumerate() {
                kx[(i, j)] += shift - qm;
            }
        }
    }
    let z = kx * &model.alphas;
    Ok(z.row_iter().map(|r| r.iter().copied().collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn cloud(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut g = rng::seeded(seed);
        (0..n).map(|_| (0..d).map(|_| g.random_range(0.0..1.0)).collect()).collect()
    }

    #[test]
    fn kernel_values() {
        let p = KernelParams::isotropic(1, 1.0).unwrap();
        assert_eq!(gaussian_kernel(&[0.3], &[0.3], &p).unwrap(), 1.0);
        let v = gaussian_kernel(&[0.0], &[1.0], &p).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.606531).abs() < 1e-6);
        let wide = KernelParams::isotropic(1, 1000.0).unwrap();
        assert!((gaussian_kernel(&[0.0], &[1.0], &wide).unwrap() - 1.0).abs() < 1e-6);
        assert!(matches!(
            gaussian_kernel(&[0.0, 1.0], &[1.0], &p),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn bandwidths_are_clamped() {
        let p = KernelParams::new(vec![0.0, -3.0, 1e9, 2.0]).unwrap();
        assert_eq!(p.theta(), &[THETA_MIN, THETA_MIN, THETA_MAX, 2.0]);
        assert!(KernelParams::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn raw_kernel_matrix_is_psd() {
        let pts = cloud(40, 3, 1);
        let p = KernelParams::new(vec![0.3, 0.5, 2.0]).unwrap();
        let scaled: Vec<Vec<f64>> = pts.iter().map(|x| p.scale(x)).collect();
        let k = gram(&scaled);
        assert_eq!(k, k.transpose());
        let eig = nalgebra::SymmetricEigen::new(k).eigenvalues;
        let max = eig.max();
        assert!(eig.iter().all(|v| *v >= -1e-10 * max));
    }

    #[test]
    fn two_points_project_symmetrically() {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.5]];
        let m = fit_kpca(&pts, &KernelParams::isotropic(2, 1.0).unwrap(), 1).unwrap();
        let z = project(&m, &pts).unwrap();
        assert!((z[0][0] + z[1][0]).abs() < 1e-14);
        // hand solution: centered K = (1 - kappa)/2 * [[1, -1], [-1, 1]]
        let kappa = (-0.5f64 * 1.25).exp();
        let lambda = 1.0 - kappa;
        assert!((m.eigenvalues()[0] - lambda).abs() < 1e-14);
        assert!((z[0][0].abs() - (lambda / 2.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tiny_bandwidth_equalizes_spectrum() {
        let pts: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, 0.0]).collect();
        let m = fit_kpca(&pts, &KernelParams::isotropic(2, 1e-3).unwrap(), 5).unwrap();
        // K = I, centered K = I - 11^T/N with eigenvalue 1 (multiplicity N-1)
        let ev = m.eigenvalues();
        assert_eq!(ev.len(), 5);
        assert!(ev.iter().all(|v| (v - 1.0).abs() <= 1e-6));
    }

    #[test]
    fn training_projection_reproduces_fitted_coordinates() {
        for n in [30, 200] {
            let pts = cloud(n, 4, 2);
            let m = fit_kpca(&pts, &KernelParams::new(vec![0.4, 0.6, 0.8, 1.0]).unwrap(), 5).unwrap();
            let z = project(&m, &pts).unwrap();
            let f = m.fitted_coordinates();
            for (a, b) in z.iter().zip(&f) {
                for (u, v) in a.iter().zip(b) {
                    assert!((u - v).abs() < 1e-8, "{u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn alpha_normalization_and_signs() {
        let pts = cloud(50, 3, 3);
        let m = fit_kpca(&pts, &KernelParams::isotropic(3, 0.5).unwrap(), 4).unwrap();
        for c in 0..m.k() {
            let col = m.alphas().column(c);
            assert!((m.eigenvalues()[c] * col.norm_squared() - 1.0).abs() < 1e-10);
            let pivot = col.iter().cloned().fold(0.0f64, |a, v| if v.abs() > a.abs() { v } else { a });
            assert!(pivot > 0.0);
        }
        assert!(m.eigenvalues().windows(2).all(|w| w[0] >= w[1] && w[1] >= 0.0));
    }

    #[test]
    fn uncentered_variant_projects_raw_kernel() {
        let pts = cloud(20, 2, 4);
        let p = KernelParams::isotropic(2, 0.7).unwrap();
        let m = fit_kpca_with(&pts, &p, 3, KpcaOptions { center: false }).unwrap();
        let z = project(&m, &pts[..1]).unwrap();
        let mut expect = 0.0;
        for j in 0..pts.len() {
            expect += m.alphas()[(j, 0)] * gaussian_kernel(&pts[0], &pts[j], &p).unwrap();
        }
        assert!((z[0][0] - expect).abs() < 1e-12);
    }

    #[test]
    fn duplicated_points_coincide() {
        let mut pts = cloud(10, 2, 5);
        pts.push(pts[3].clone());
        let m = fit_kpca(&pts, &KernelParams::isotropic(2, 0.5).unwrap(), 3).unwrap();
        let z = project(&m, &pts).unwrap();
        assert_eq!(z[3], z[10]);
        assert_eq!(project(&m, &pts[..2]).unwrap(), project(&m, &pts[..2]).unwrap());
    }

    #[test]
    fn degenerate_inputs() {
        let same = vec![vec![0.5, 0.5]; 5];
        assert!(matches!(
            fit_kpca(&same, &KernelParams::isotropic(2, 1.0).unwrap(), 2),
            Err(Error::DegenerateKernel)
        ));
        let pts = cloud(5, 2, 6);
        assert!(fit_kpca(&pts[..1], &KernelParams::isotropic(2, 1.0).unwrap(), 1).is_err());
        assert!(fit_kpca(&pts, &KernelParams::isotropic(2, 1.0).unwrap(), 6).is_err());
        assert!(fit_kpca(&pts, &KernelParams::isotropic(3, 1.0).unwrap(), 2).is_err());
    }

    #[test]
    fn floor_truncates_rank_deficient_spectra() {
        // three distinct locations: centered kernel has rank 2
        let pts = vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0], vec![2.0]];
        let m = fit_kpca(&pts, &KernelParams::isotropic(1, 1.0).unwrap(), 4).unwrap();
        assert_eq!(m.k(), 2);
        assert!(m.truncated());
    }
}
