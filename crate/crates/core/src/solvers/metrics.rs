use crate::error::{Error, Result};
use crate::linalg::{dist2, norm2};

/// `||x_hat - x_true|| / ||x_true||`.
pub fn relative_rmse(x_hat: &[f64], x_true: &[f64]) -> Result<f64> {
    if x_hat.len() != x_true.len() {
        return Err(Error::DimensionMismatch {
            expected: x_true.len(),
            actual: x_hat.len(),
            context: "relative rmse",
        });
    }
    let denom = norm2(x_true);
    if denom == 0.0 {
        return Err(Error::invalid("reference signal is zero"));
    }
    Ok(dist2(x_hat, x_true) / denom)
}
