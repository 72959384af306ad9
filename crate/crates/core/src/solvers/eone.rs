use super::options::{eone_default_r, SolverOptions, SolverResult, Status};
use super::setup::{prepare, residual_norm};
use super::threshold::shrink_in_place;
use crate::error::Result;
use crate::linalg::{dist2, norm2};
use crate::operators::SamplingOperator;

/// Exact orthonormal-expansion solver (augmented Lagrangian with an inner
/// proximal loop).
///
/// With `B'B = I - A'A` the expanded inner iteration collapses to
///
/// ```text
/// x^{j+1} = S_{1/mu_t}(x^j + A'(b + y_A/mu_t - A x^j))
/// ```
///
/// where `y_A` is the observed block of the multiplier (the hidden block
/// stays zero). After the inner loop, `y_A += mu_t (b - A x_{t+1})` and
/// `mu_{t+1} = r mu_t`.
pub fn solve_eone_l1(a: &SamplingOperator, b: &[f64], opts: &SolverOptions) -> Result<SolverResult> {
    let prep = prepare(a, b, opts, eone_default_r)?;
    let sched = prep.schedule;
    let stop = opts.stop_rule(opts.tau1, prep.b_norm);
    let n = a.rows();

    let mut x = vec![0.0; a.cols()];
    let mut ax = vec![0.0; n];
    let mut y_a = vec![0.0; n];
    let mut history = Vec::new();
    let mut iterates = Vec::new();
    let mut inner_total = 0;
    let mut status = Status::MaxIterations;

    for t in 0..opts.max_outer {
        let mu = sched.mu(t);
        let shifted: Vec<f64> = b.iter().zip(&y_a).map(|(bi, yi)| bi + yi / mu).collect();
        let inner = inner_solve(a, &shifted, mu, &mut x, &mut ax, opts.tau2, opts.max_inner);
        inner_total += inner;

        for i in 0..n {
            y_a[i] += mu * (b[i] - ax[i]);
        }
        let res = residual_norm(&ax, b);
        history.push(res / prep.b_norm);
        if opts.keep_iterates {
            iterates.push(x.clone());
        }
        if stop.satisfied(res) {
            status = Status::Converged;
            break;
        }
    }

    Ok(SolverResult {
        x_hat: x,
        outer_iters: history.len(),
        inner_iters: inner_total,
        operator_calls: a.total_calls() - prep.calls_at_start,
        residual_history: history,
        status,
        iterates,
    })
}

/// Fixed-point iteration for `min ||x||_1 + mu/2 ||A x - shifted||^2`,
/// warm-started from `x` (with `ax = A x`). Both are updated in place.
/// Returns the number of steps taken; `max_inner` means the relative-change
/// test never fired.
pub(crate) fn inner_solve(
    a: &SamplingOperator,
    shifted: &[f64],
    mu: f64,
    x: &mut Vec<f64>,
    ax: &mut Vec<f64>,
    tau2: f64,
    max_inner: usize,
) -> usize {
    let lambda = 1.0 / mu;
    for step in 1..=max_inner {
        let resid: Vec<f64> = shifted.iter().zip(ax.iter()).map(|(s, p)| s - p).collect();
        let mut x_next = a.adjoint(&resid);
        for (g, xi) in x_next.iter_mut().zip(x.iter()) {
            *g += xi;
        }
        shrink_in_place(&mut x_next, lambda);
        let change = dist2(&x_next, x);
        let scale = norm2(x);
        *x = x_next;
        *ax = a.apply(x);
        let small = if scale > 0.0 {
            change / scale < tau2
        } else {
            change < tau2
        };
        if small {
            return step;
        }
    }
    max_inner
}
