use crate::error::{Error, Result};
use crate::operators::SamplingOperator;

#[inline]
pub fn soft_threshold_scalar(w: f64, lambda: f64) -> f64 {
    if w > lambda {
        w - lambda
    } else if w < -lambda {
        w + lambda
    } else {
        0.0
    }
}

/// Elementwise `sgn(w) max(|w| - lambda, 0)`, the proximal map of
/// `lambda ||.||_1`.
pub fn soft_threshold(w: &[f64], lambda: f64) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(Error::invalid(format!("threshold must be >= 0, got {lambda}")));
    }
    Ok(w.iter().map(|&v| soft_threshold_scalar(v, lambda)).collect())
}

pub(crate) fn shrink_in_place(w: &mut [f64], lambda: f64) {
    for v in w {
        *v = soft_threshold_scalar(*v, lambda);
    }
}

/// The `ceil(alpha N)`-th smallest entry of `|v|` (1-based order statistic).
pub fn abs_quantile(v: &[f64], alpha: f64) -> f64 {
    assert!(!v.is_empty());
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    let rank = ((alpha * mags.len() as f64).ceil() as usize).clamp(1, mags.len());
    let (_, q, _) = mags.select_nth_unstable_by(rank - 1, f64::total_cmp);
    *q
}

/// `mu_0 = 1 / Q_alpha(|A'b|)`. Costs one adjoint call.
pub fn mu0_from_quantile(a: &SamplingOperator, b: &[f64], alpha: f64) -> Result<f64> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.len(),
            context: "measurement vector",
        });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0,1), got {alpha}")));
    }
    if b.iter().all(|v| *v == 0.0) {
        return Err(Error::invalid("measurement vector is zero"));
    }
    let q = abs_quantile(&a.adjoint(b), alpha);
    if !(q > 0.0) {
        return Err(Error::invalid("alpha-quantile of |A'b| is zero"));
    }
    Ok(1.0 / q)
}
