//! Datasets of experimental design points and model responses.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

/// Experimental design points paired with the model response at each point.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Vec<f64>>,
    responses: Vec<f64>,
    names: Option<Vec<String>>,
}

impl Dataset {
    pub fn new(points: Vec<Vec<f64>>, responses: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InsufficientData {
                requested: 1,
                available: 0,
            });
        }
        if points.len() != responses.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                found: responses.len(),
            });
        }
        let dim = points[0].len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("dataset points"));
            }
        }
        if responses.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("dataset responses"));
        }
        Ok(Self {
            points,
            responses,
            names: None,
        })
    }

    /// Attach feature column names (one per input dimension).
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                found: names.len(),
            });
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    /// Column names, falling back to `x1..xd`.
    pub fn column_names(&self) -> Vec<String> {
        match &self.names {
            Some(n) => n.clone(),
            None => (1..=self.dim()).map(|i| format!("x{i}")).collect(),
        }
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let points = indices.iter().map(|&i| self.points[i].clone()).collect();
        let responses = indices.iter().map(|&i| self.responses[i]).collect();
        let mut out = Dataset::new(points, responses)?;
        out.names = self.names.clone();
        Ok(out)
    }
}

/// Train, validation and test parts of a parent dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitDataset {
    pub train: Dataset,
    pub validation: Dataset,
    pub test: Dataset,
}

/// Index sets produced by [`split_indices`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn split_indices(
    n: usize,
    n_train: usize,
    n_val: usize,
    n_test: usize,
    seed: u64,
) -> Result<SplitIndices> {
    let requested = n_train + n_val + n_test;
    if n_train == 0 || n_val == 0 || n_test == 0 || requested > n {
        return Err(Error::InsufficientData {
            requested,
            available: n,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::substream(seed, &[0x5eed_5b17]));
    let validation_start = n_train;
    let test_start = n_train + n_val;
    Ok(SplitIndices {
        train: order[..validation_start].to_vec(),
        validation: order[validation_start..test_start].to_vec(),
        test: order[test_start..requested].to_vec(),
    })
}

/// Shuffle deterministically under `seed`, then assign contiguous blocks of
/// exactly the requested sizes. Leftover points are dropped.
pub fn split_dataset(
    data: &Dataset,
    n_train: usize,
    n_val: usize,
    n_test: usize,
    seed: u64,
) -> Result<SplitDataset> {
    let idx = split_indices(data.len(), n_train, n_val, n_test, seed)?;
    Ok(SplitDataset {
        train: data.subset(&idx.train)?,
        validation: data.subset(&idx.validation)?,
        test: data.subset(&idx.test)?,
    })
}
