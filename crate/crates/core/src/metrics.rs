use crate::error::{Error, Result};

/// Relative generalization error of a prediction set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalReport {
    pub error: f64,
    pub n_points: usize,
    /// Mean of the evaluated responses (the normalizing baseline).
    pub sample_mean: f64,
}

/// Residual sum of squares divided by the total sum of squares of `y_true`
/// about its own mean. 0 is a perfect fit, 1 is no better than the mean.
pub fn relative_error(y_true: &[f64], y_pred: &[f64]) -> Result<EvalReport> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.len() < 2 {
        return Err(Error::InsufficientData {
            requested: 2,
            available: y_true.len(),
        });
    }
    let n = y_true.len();
    let mean = y_true.iter().sum::<f64>() / n as f64;
    let total: f64 = y_true.iter().map(|y| (y - mean) * (y - mean)).sum();
    if total == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let residual: f64 = y_true
        .iter()
        .zip(y_pred)
        .map(|(y, p)| (y - p) * (y - p))
        .sum();
    Ok(EvalReport {
        error: residual / total,
        n_points: n,
        sample_mean: mean,
    })
}
