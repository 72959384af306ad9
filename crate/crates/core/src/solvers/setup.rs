use super::options::{ContinuationSchedule, SolverOptions};
use super::threshold::mu0_from_quantile;
use crate::error::{Error, Result};
use crate::linalg::norm2;
use crate::operators::SamplingOperator;

/// Tolerance of the one-shot `A A' v = v` spot check.
pub(crate) const ORTHONORMAL_CHECK_TOL: f64 = 1e-6;
const CHECK_SEED: u64 = 0x5EED_0A0A;

pub(crate) struct Prepared {
    pub schedule: ContinuationSchedule,
    pub b_norm: f64,
    pub calls_at_start: u64,
}

pub(crate) fn check_problem(a: &SamplingOperator, b: &[f64], opts: &SolverOptions) -> Result<()> {
    opts.validate()?;
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.len(),
            context: "measurement vector",
        });
    }
    let deviation = a.orthonormality_defect(CHECK_SEED);
    if !(deviation <= ORTHONORMAL_CHECK_TOL) {
        return Err(Error::NotOrthonormal { deviation });
    }
    Ok(())
}

/// Validate the problem and resolve the continuation schedule.
pub(crate) fn prepare(
    a: &SamplingOperator,
    b: &[f64],
    opts: &SolverOptions,
    default_r: fn(usize, usize) -> f64,
) -> Result<Prepared> {
    let calls_at_start = a.total_calls();
    check_problem(a, b, opts)?;
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Err(Error::invalid("measurement vector is zero"));
    }
    let mu0 = match opts.mu0 {
        Some(m) => m,
        None => mu0_from_quantile(a, b, opts.alpha)?,
    };
    let r = opts.r.unwrap_or_else(|| default_r(a.rows(), a.cols()));
    Ok(Prepared {
        schedule: ContinuationSchedule::new(mu0, r)?,
        b_norm,
        calls_at_start,
    })
}

pub(crate) fn residual_norm(ax: &[f64], b: &[f64]) -> f64 {
    ax.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}
