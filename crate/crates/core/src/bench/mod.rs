//! Sobol G-function benchmark data.

mod sobol;

use crate::data::{Dataset, SplitDataset};
use crate::error::{Error, Result};

pub use sobol::{sobol_sequence, SobolSequence, MAX_SOBOL_DIM};

/// Leading coefficients of the reference G-function configuration; further
/// entries are 500.
const REFERENCE_U_HEAD: [f64; 7] = [1.0, 2.0, 5.0, 20.0, 50.0, 100.0, 500.0];

/// `prod_i (|4 x_i - 2| + u_i) / (1 + u_i)` on the unit cube.
pub fn g_function(x: &[f64], u: &[f64]) -> Result<f64> {
    if x.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: x.len(),
        });
    }
    let mut prod = 1.0;
    for (index, (&xi, &ui)) in x.iter().zip(u).enumerate() {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::DomainViolation { index, value: xi });
        }
        prod *= ((4.0 * xi - 2.0).abs() + ui) / (1.0 + ui);
    }
    Ok(prod)
}

/// `{1, 2, 5, 20, 50, 100, 500, ..., 500}` of length `dim`.
pub fn reference_u(dim: usize) -> Result<Vec<f64>> {
    if dim < REFERENCE_U_HEAD.len() {
        return Err(Error::DimTooSmall(dim));
    }
    let mut u = REFERENCE_U_HEAD.to_vec();
    u.resize(dim, 500.0);
    Ok(u)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SobolSpec {
    pub dim: usize,
    pub u: Vec<f64>,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    /// Sequence points discarded before the first sample (1 drops the origin).
    pub skip: u64,
}

impl SobolSpec {
    /// The reference configuration: 20 inputs, 800/1200/2000 split.
    pub fn reference() -> Self {
        Self {
            dim: 20,
            u: reference_u(20).expect("20 >= 7"),
            n_train: 800,
            n_val: 1200,
            n_test: 2000,
            skip: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.u.len() != self.dim {
            return Err(Error::LengthMismatch {
                expected: self.dim,
                found: self.u.len(),
            });
        }
        if self.u.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(Error::invalid("G-function coefficients must be finite and nonnegative"));
        }
        if self.n_train == 0 || self.n_val == 0 || self.n_test == 0 {
            return Err(Error::invalid("every split needs at least one point"));
        }
        Ok(())
    }
}

/// Evaluate the G-function on consecutive Sobol points and cut the sequence
/// into contiguous train / validation / test blocks.
pub fn make_sobol_dataset(spec: &SobolSpec) -> Result<SplitDataset> {
    spec.validate()?;
    let total = spec.n_train + spec.n_val + spec.n_test;
    let points = sobol_sequence(spec.dim, total, spec.skip)?;
    let block = |range: std::ops::Range<usize>| -> Result<Dataset> {
        let pts = points[range].to_vec();
        let ys = pts.iter().map(|x| g_function(x, &spec.u)).collect::<Result<Vec<_>>>()?;
        Dataset::new(pts, ys)
    };
    let a = spec.n_train;
    let b = a + spec.n_val;
    Ok(SplitDataset {
        train: block(0..a)?,
        validation: block(a..b)?,
        test: block(b..total)?,
    })
}
