use super::options::{rone_default_r, SolverOptions, SolverResult, Status};
use super::setup::{prepare, residual_norm};
use super::threshold::shrink_in_place;
use crate::error::Result;
use crate::operators::SamplingOperator;

/// Relaxed orthonormal-expansion solver.
///
/// Runs the single-step ALM iteration in its matrix-free form
///
/// ```text
/// x_{t+1} = S_{lambda_t}(x_t + A' z_t)
/// z_t     = b - A[(1 + kappa_t) x_t - kappa_t x_{t-1}] + kappa_t z_{t-1}
/// ```
///
/// with `lambda_t = 1/mu_t`, `kappa_t = mu_{t-1}/mu_t` and zero initial
/// state. `A x_t` is kept from the previous residual check, so each iteration
/// costs one `A` and one `A'` call.
pub fn solve_rone_l1(a: &SamplingOperator, b: &[f64], opts: &SolverOptions) -> Result<SolverResult> {
    let prep = prepare(a, b, opts, rone_default_r)?;
    let sched = prep.schedule;
    let stop = opts.stop_rule(opts.tau, prep.b_norm);
    let (n, len) = (a.rows(), a.cols());

    let mut x = vec![0.0; len];
    let mut ax = vec![0.0; n];
    let mut ax_prev = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut history = Vec::new();
    let mut iterates = Vec::new();
    let mut status = Status::MaxIterations;

    for t in 0..opts.max_outer {
        let kappa = sched.kappa(t);
        // z_t, overwriting z_{t-1}
        for i in 0..n {
            let extrapolated = (1.0 + kappa) * ax[i] - kappa * ax_prev[i];
            z[i] = b[i] - extrapolated + kappa * z[i];
        }
        let mut x_next = a.adjoint(&z);
        for (g, xi) in x_next.iter_mut().zip(&x) {
            *g += xi;
        }
        shrink_in_place(&mut x_next, sched.lambda(t));
        x = x_next;
        ax_prev = std::mem::replace(&mut ax, a.apply(&x));

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
        inner_iters: history.len(),
        operator_calls: a.total_calls() - prep.calls_at_start,
        residual_history: history,
        status,
        iterates,
    })
}
