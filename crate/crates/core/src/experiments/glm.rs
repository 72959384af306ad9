//! Binomial logistic regression of success counts on the sparsity ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{solve_square, DenseMatrix};

const MAX_IRLS_ITERS: usize = 50;
const RIDGE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitStatus {
    /// Maximum-likelihood fit with overlapping outcomes.
    Fitted,
    /// Outcomes separated in `rho`: no finite MLE. The estimate is the cell
    /// shared by both outcomes (quasi-complete) or the midpoint of the gap
    /// (complete).
    Separated,
    /// Every trial succeeded; estimate clamped to the largest `rho`.
    AllSuccess,
    /// Every trial failed; estimate clamped to the smallest `rho`.
    AllFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    /// `rho` at which the fitted success probability is 1/2.
    pub rho_hat: f64,
    /// `logit P(success) = intercept + slope * rho`; NaN unless fitted.
    pub intercept: f64,
    pub slope: f64,
    /// Delta-method standard error of `rho_hat`; NaN unless fitted.
    pub std_error: f64,
    pub iterations: usize,
    pub status: FitStatus,
}

impl LogisticFit {
    pub fn is_degenerate(&self) -> bool {
        self.status != FitStatus::Fitted
    }

    fn clamped(rho_hat: f64, status: FitStatus) -> Self {
        Self {
            rho_hat,
            intercept: f64::NAN,
            slope: f64::NAN,
            std_error: f64::NAN,
            iterations: 0,
            status,
        }
    }
}

/// Fit `successes[i] ~ Binomial(trials, sigmoid(b0 + b1 rho[i]))` by
/// iteratively reweighted least squares (at most 50 iterations, ridge `1e-8`
/// on the normal equations) and return the 50% crossing `-b0/b1`.
pub fn fit_logistic_midpoint(rhos: &[f64], successes: &[usize], trials: usize) -> Result<LogisticFit> {
    if rhos.len() != successes.len() {
        return Err(Error::DimensionMismatch {
            expected: rhos.len(),
            actual: successes.len(),
            context: "success counts",
        });
    }
    if trials == 0 || rhos.is_empty() {
        return Err(Error::invalid("need at least one cell and one trial"));
    }
    if rhos.iter().any(|r| !r.is_finite()) {
        return Err(Error::invalid("non-finite rho"));
    }
    if successes.iter().any(|&s| s > trials) {
        return Err(Error::invalid("more successes than trials"));
    }
    let mut cells: Vec<(f64, usize)> = rhos.iter().copied().zip(successes.iter().copied()).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lo = cells[0].0;
    let hi = cells[cells.len() - 1].0;

    if cells.iter().all(|c| c.1 == trials) {
        return Ok(LogisticFit::clamped(hi, FitStatus::AllSuccess));
    }
    if cells.iter().all(|c| c.1 == 0) {
        return Ok(LogisticFit::clamped(lo, FitStatus::AllFailure));
    }
    if let Some(rho) = separation_point(&cells, trials) {
        return Ok(LogisticFit::clamped(rho, FitStatus::Separated));
    }
    let distinct = cells.windows(2).filter(|w| w[1].0 > w[0].0).count() + 1;
    if distinct < 2 {
        return Err(Error::invalid("need at least two distinct rho values"));
    }
    Ok(irls(&cells, trials))
}

/// Success-high-then-low separation (the physically meaningful direction) or
/// its mirror image. Returns the separating `rho` if the MLE does not exist.
fn separation_point(cells: &[(f64, usize)], trials: usize) -> Option<f64> {
    let successes_at = |c: &(f64, usize)| c.1 > 0;
    let failures_at = |c: &(f64, usize)| c.1 < trials;
    let max_success = cells.iter().filter(|c| successes_at(c)).map(|c| c.0).fold(f64::MIN, f64::max);
    let min_failure = cells.iter().filter(|c| failures_at(c)).map(|c| c.0).fold(f64::MAX, f64::min);
    let min_success = cells.iter().filter(|c| successes_at(c)).map(|c| c.0).fold(f64::MAX, f64::min);
    let max_failure = cells.iter().filter(|c| failures_at(c)).map(|c| c.0).fold(f64::MIN, f64::max);
    if max_success <= min_failure {
        Some(0.5 * (max_success + min_failure))
    } else if max_failure <= min_success {
        Some(0.5 * (max_failure + min_success))
    } else {
        None
    }
}

fn irls(cells: &[(f64, usize)], trials: usize) -> LogisticFit {
    let m = trials as f64;
    let center = cells.iter().map(|c| c.0).sum::<f64>() / cells.len() as f64;
    let mut beta = [0.0f64, 0.0f64];
    let mut info = DenseMatrix::zeros(2, 2);
    let mut iterations = 0;
    for it in 1..=MAX_IRLS_ITERS {
        iterations = it;
        info = DenseMatrix::zeros(2, 2);
        let mut rhs = [0.0f64; 2];
        for &(rho, s) in cells {
            let x = rho - center;
            let eta = beta[0] + beta[1] * x;
            let p = sigmoid(eta);
            let var = (p * (1.0 - p)).max(1e-12);
            let w = m * var;
            let z = eta + (s as f64 / m - p) / var;
            info[(0, 0)] += w;
            info[(0, 1)] += w * x;
            info[(1, 1)] += w * x * x;
            rhs[0] += w * z;
            rhs[1] += w * x * z;
        }
        info[(1, 0)] = info[(0, 1)];
        let mut damped = info.clone();
        damped[(0, 0)] += RIDGE;
        damped[(1, 1)] += RIDGE;
        let Some(next) = solve_square(&damped, &rhs, 0.0) else {
            break;
        };
        let change = (next[0] - beta[0]).abs().max((next[1] - beta[1]).abs());
        beta = [next[0], next[1]];
        if change < 1e-10 * (1.0 + beta[0].abs().max(beta[1].abs())) {
            break;
        }
    }
    let (b0, b1) = (beta[0], beta[1]);
    let rho_hat = center - b0 / b1;
    // covariance = info^{-1}; gradient of rho_hat wrt (b0, b1)
    let det = info[(0, 0)] * info[(1, 1)] - info[(0, 1)] * info[(0, 1)];
    let (c00, c01, c11) = (info[(1, 1)] / det, -info[(0, 1)] / det, info[(0, 0)] / det);
    let (g0, g1) = (-1.0 / b1, b0 / (b1 * b1));
    let var = g0 * g0 * c00 + 2.0 * g0 * g1 * c01 + g1 * g1 * c11;
    LogisticFit {
        rho_hat,
        intercept: b0 - b1 * center,
        slope: b1,
        std_error: var.max(0.0).sqrt(),
        iterations,
        status: FitStatus::Fitted,
    }
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}
