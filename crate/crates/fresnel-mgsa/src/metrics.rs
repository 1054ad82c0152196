//! Reconstruction-quality scalar metrics.

use ndarray::Array2;

use crate::{Error, Result};

/// Pearson correlation coefficient, guaranteed finite and in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CorrelationValue(f64);

impl CorrelationValue {
    pub fn value(&self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for CorrelationValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.9}", self.0)
    }
}

fn check_pair(a: &Array2<f64>, b: &Array2<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    if a.dim() != b.dim() {
        return Err(Error::SideMismatch {
            got: b.nrows(),
            expected: a.nrows(),
            context: "metric array sides",
        });
    }
    Ok(())
}

/// Pearson product-moment correlation over all samples of two equally sized
/// square arrays.
///
/// Two passes: means first, then centered moments. The accumulation order
/// is identical for both arguments, so `correlation(a, b)` and
/// `correlation(b, a)` agree bit for bit. Arrays of zero variance have no
/// defined correlation and are rejected rather than producing NaN.
pub fn correlation(a: &Array2<f64>, b: &Array2<f64>) -> Result<CorrelationValue> {
    check_pair(a, b)?;
    let count = a.len() as f64;
    let mean_a = a.sum() / count;
    let mean_b = b.sum() / count;

    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (&x, &y) in a.iter().zip(b.iter()) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        cov += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 {
        return Err(Error::ZeroVariance { which: "first" });
    }
    if var_b == 0.0 {
        return Err(Error::ZeroVariance { which: "second" });
    }
    // Single square root of the product keeps r == ±1 exact when one
    // array is an affine image of the other.
    let r = cov / (var_a * var_b).sqrt();
    if !r.is_finite() || r.abs() > 1.0 + 1e-12 {
        return Err(Error::ZeroVariance { which: "either" });
    }
    Ok(CorrelationValue(r.clamp(-1.0, 1.0)))
}

/// Largest absolute deviation between `a` and `b` as a percentage of the
/// largest absolute value of the reference `a`: `100·max|a - b|/max|a|`.
pub fn max_error_percent(a: &Array2<f64>, b: &Array2<f64>) -> Result<f64> {
    check_pair(a, b)?;
    let scale = a.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if scale == 0.0 {
        return Err(Error::ZeroReference);
    }
    let max_dev = a
        .iter()
        .zip(b.iter())
        .fold(0.0f64, |m, (&x, &y)| m.max((x - y).abs()));
    Ok(100.0 * max_dev / scale)
}
