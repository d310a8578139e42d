//! Unscrambled Sobol low-discrepancy sequence (Joe–Kuo D6 direction numbers).

use crate::error::{Error, Result};

const BITS: u32 = 32;
const TABLE: &str = include_str!("new-joe-kuo-6.64");

/// Highest supported dimension.
pub const MAX_SOBOL_DIM: usize = 64;

/// Direction numbers for dimensions `1..=dim`, one row of `BITS` entries each.
fn direction_numbers(dim: usize) -> Vec<[u32; BITS as usize]> {
    let mut out = Vec::with_capacity(dim);
    // first coordinate: van der Corput in base 2
    let mut first = [0u32; BITS as usize];
    for (k, v) in first.iter_mut().enumerate() {
        *v = 1 << (BITS - 1 - k as u32);
    }
    out.push(first);
    for line in TABLE.lines().skip(1).take(dim.saturating_sub(1)) {
        let fields: Vec<u32> = line
            .split_whitespace()
            .map(|f| f.parse().expect("direction table is well formed"))
            .collect();
        let (s, a) = (fields[1] as usize, fields[2]);
        let mut m: Vec<u32> = fields[3..3 + s].to_vec();
        for k in s..BITS as usize {
            let mut next = m[k - s] ^ (m[k - s] << s);
            for j in 1..s {
                if (a >> (s - 1 - j)) & 1 == 1 {
                    next ^= m[k - j] << j;
                }
            }
            m.push(next);
        }
        let mut v = [0u32; BITS as usize];
        for k in 0..BITS as usize {
            v[k] = m[k] << (BITS - 1 - k as u32);
        }
        out.push(v);
    }
    out
}

/// Iterator over Sobol points in `[0, 1)^dim`, in Gray-code order.
#[derive(Debug, Clone)]
pub struct SobolSequence {
    directions: Vec<[u32; BITS as usize]>,
    state: Vec<u32>,
    index: u64,
}

impl SobolSequence {
    pub fn new(dim: usize) -> Result<Self> {
        Self::starting_at(dim, 0)
    }

    /// Sequence positioned so that the next point returned is point `skip`.
    pub fn starting_at(dim: usize, skip: u64) -> Result<Self> {
        if dim == 0 || dim > MAX_SOBOL_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if skip >= 1 << BITS {
            return Err(Error::invalid("Sobol skip exceeds sequence length"));
        }
        let directions = direction_numbers(dim);
        let gray = skip ^ (skip >> 1);
        let state = directions
            .iter()
            .map(|v| {
                (0..BITS as usize)
                    .filter(|&k| (gray >> k) & 1 == 1)
                    .fold(0u32, |acc, k| acc ^ v[k])
            })
            .collect();
        Ok(Self {
            directions,
            state,
            index: skip,
        })
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }
}

impl Iterator for SobolSequence {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.index >= 1 << BITS {
            return None;
        }
        let point = self
            .state
            .iter()
            .map(|&s| s as f64 / (1u64 << BITS) as f64)
            .collect();
        let bit = self.index.trailing_ones() as usize;
        if bit < BITS as usize {
            for (s, v) in self.state.iter_mut().zip(&self.directions) {
                *s ^= v[bit];
            }
        }
        self.index += 1;
        Some(point)
    }
}

/// The first `n` points after discarding `skip`.
pub fn sobol_sequence(dim: usize, n: usize, skip: u64) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::invalid("requested zero Sobol points"));
    }
    Ok(SobolSequence::starting_at(dim, skip)?.take(n).collect())
}
