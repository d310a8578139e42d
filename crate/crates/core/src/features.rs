//! Random feature expansions with q-sparse Gaussian weights.
//!
//! Each weight vector has exactly `min(q, dim)` nonzero coordinates. The
//! support of weight `j` is the set of active variables of the low-order
//! component it contributes to.

use nalgebra::{DMatrix, DVector};
use rand::seq::index;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Cos,
    Sin,
    Relu,
}

impl BasisKind {
    #[inline]
    pub fn apply(self, t: f64) -> f64 {
        match self {
            BasisKind::Cos => t.cos(),
            BasisKind::Sin => t.sin(),
            BasisKind::Relu => t.max(0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Cos => "cos",
            BasisKind::Sin => "sin",
            BasisKind::Relu => "relu",
        }
    }
}

impl std::str::FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cos" => Ok(BasisKind::Cos),
            "sin" => Ok(BasisKind::Sin),
            "relu" => Ok(BasisKind::Relu),
            other => Err(Error::invalid(format!("unknown basis `{other}`"))),
        }
    }
}

/// A fixed realization of R sparse weight vectors in `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureWeights {
    dim: usize,
    q: usize,
    sigma: f64,
    seed: u64,
    /// Sorted support of each weight vector.
    supports: Vec<Vec<usize>>,
    /// Nonzero values, aligned with `supports`.
    values: Vec<Vec<f64>>,
}

impl FeatureWeights {
    /// Rebuild weights from stored supports and values (model loading).
    pub fn from_parts(
        dim: usize,
        q: usize,
        sigma: f64,
        seed: u64,
        supports: Vec<Vec<usize>>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if supports.is_empty() || supports.len() != values.len() {
            return Err(Error::invalid("feature supports and values must be nonempty and aligned"));
        }
        let active = q.min(dim);
        for (s, v) in supports.iter().zip(&values) {
            if s.len() != active || v.len() != active {
                return Err(Error::invalid("feature support size differs from min(q, dim)"));
            }
            if s.iter().any(|&i| i >= dim) || s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid("feature support indices must be sorted and < dim"));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("feature weights"));
            }
        }
        Ok(Self {
            dim,
            q,
            sigma,
            seed,
            supports,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Requested sparsity order (before clamping to `dim`).
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Dense copy of weight vector `j`.
    pub fn dense(&self, j: usize) -> Vec<f64> {
        let mut w = vec![0.0; self.dim];
        for (&i, &v) in self.supports[j].iter().zip(&self.values[j]) {
            w[i] = v;
        }
        w
    }

    #[inline]
    fn inner(&self, j: usize, x: &[f64]) -> f64 {
        self.supports[j]
            .iter()
            .zip(&self.values[j])
            .map(|(&i, &w)| x[i] * w)
            .sum()
    }
}

/// Draw `r` weight vectors with `min(q, dim)` nonzero N(0, sigma^2) entries on
/// supports sampled uniformly (with replacement across vectors).
pub fn draw_feature_weights(
    dim: usize,
    q: usize,
    r: usize,
    sigma: f64,
    seed: u64,
) -> Result<FeatureWeights> {
    if dim == 0 || q == 0 || r == 0 {
        return Err(Error::invalid("dim, q and R must all be at least 1"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma must be positive and finite"));
    }
    let active = q.min(dim);
    let normal = Normal::new(0.0, sigma).expect("sigma validated above");
    let mut gen = rng::seeded(seed);
    let mut supports = Vec::with_capacity(r);
    let mut values = Vec::with_capacity(r);
    for _ in 0..r {
        let mut support = index::sample(&mut gen, dim, active).into_vec();
        support.sort_unstable();
        let v: Vec<f64> = (0..active).map(|_| normal.sample(&mut gen)).collect();
        supports.push(support);
        values.push(v);
    }
    Ok(FeatureWeights {
        dim,
        q,
        sigma,
        seed,
        supports,
        values,
    })
}

fn check_dims(points: &[Vec<f64>], dim: usize) -> Result<()> {
    match points.iter().find(|p| p.len() != dim) {
        Some(p) => Err(Error::DimensionMismatch {
            expected: dim,
            found: p.len(),
        }),
        None => Ok(()),
    }
}

/// `A[i][j] = phi(<x_i, w_j>)`, an `m x R` matrix.
pub fn feature_matrix(
    points: &[Vec<f64>],
    weights: &FeatureWeights,
    basis: BasisKind,
) -> Result<DMatrix<f64>> {
    check_dims(points, weights.dim)?;
    let m = points.len();
    let r = weights.len();
    let mut a = DMatrix::<f64>::zeros(m, r);
    if m == 0 {
        return Ok(a);
    }
    // column-major storage: one contiguous chunk per feature
    a.as_mut_slice()
        .par_chunks_mut(m)
        .enumerate()
        .for_each(|(j, col)| {
            for (out, x) in col.iter_mut().zip(points) {
                *out = basis.apply(weights.inner(j, x));
            }
        });
    Ok(a)
}

/// A fitted expansion `f(x) = intercept + sum_j c_j phi(<x, w_j>)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomFeatureModel {
    pub basis: BasisKind,
    pub weights: FeatureWeights,
    pub coefficients: DVector<f64>,
    pub intercept: f64,
}

impl RandomFeatureModel {
    pub fn new(
        basis: BasisKind,
        weights: FeatureWeights,
        coefficients: DVector<f64>,
        intercept: f64,
    ) -> Result<Self> {
        if coefficients.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: weights.len(),
                found: coefficients.len(),
            });
        }
        if coefficients.iter().any(|c| !c.is_finite()) || !intercept.is_finite() {
            return Err(Error::NonFinite("expansion coefficients"));
        }
        Ok(Self {
            basis,
            weights,
            coefficients,
            intercept,
        })
    }

    pub fn nnz(&self) -> usize {
        self.coefficients.iter().filter(|c| **c != 0.0).count()
    }
}

/// Evaluate the expansion at each point. Features with a zero coefficient are
/// skipped; they contribute exactly nothing to the sum.
pub fn evaluate_expansion(model: &RandomFeatureModel, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    check_dims(points, model.weights.dim)?;
    let active: Vec<(usize, f64)> = model
        .coefficients
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| (j, *c))
        .collect();
    Ok(points
        .par_iter()
        .map(|x| {
            let s: f64 = active
                .iter()
                .map(|&(j, c)| c * model.basis.apply(model.weights.inner(j, x)))
                .sum();
            model.intercept + s
        })
        .collect())
}
