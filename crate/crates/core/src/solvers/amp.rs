use super::options::{SolverOptions, SolverResult, Status};
use super::setup::{check_problem, residual_norm};
use super::threshold::shrink_in_place;
use crate::error::Result;
use crate::linalg::{count_nonzero, norm2};
use crate::operators::SamplingOperator;

/// Approximate message passing baseline.
///
/// ```text
/// z_t     = b - A x_t + (||x_t||_0 / n) z_{t-1}
/// x_{t+1} = S_{lambda_t}(x_t + A' z_t),   lambda_t = theta ||z_t|| / sqrt(n)
/// ```
///
/// Stops on the relative residual rule with `tau`. A zero measurement vector
/// is accepted and returns zero after one iteration.
pub fn solve_amp(a: &SamplingOperator, b: &[f64], opts: &SolverOptions) -> Result<SolverResult> {
    let calls_at_start = a.total_calls();
    check_problem(a, b, opts)?;
    let n = a.rows();
    let b_norm = norm2(b);
    let stop = opts.stop_rule(opts.tau, b_norm);
    let relative = |res: f64| if b_norm > 0.0 { res / b_norm } else { res };

    let mut x = vec![0.0; a.cols()];
    let mut ax = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut history = Vec::new();
    let mut iterates = Vec::new();
    let mut status = Status::MaxIterations;

    for _ in 0..opts.max_outer {
        let onsager = count_nonzero(&x) as f64 / n as f64;
        for i in 0..n {
            z[i] = b[i] - ax[i] + onsager * z[i];
        }
        let lambda = opts.amp_theta * norm2(&z) / (n as f64).sqrt();
        let mut x_next = a.adjoint(&z);
        for (g, xi) in x_next.iter_mut().zip(&x) {
            *g += xi;
        }
        shrink_in_place(&mut x_next, lambda);
        x = x_next;
        ax = a.apply(&x);

        let res = residual_norm(&ax, b);
        history.push(relative(res));
        if opts.keep_iterates {
            iterates.push(x.clone());
        }
        if stop.satisfied(res) || (b_norm == 0.0 && res == 0.0) {
            status = Status::Converged;
            break;
        }
    }

    Ok(SolverResult {
        x_hat: x,
        outer_iters: history.len(),
        inner_iters: history.len(),
        operator_calls: a.total_calls() - calls_at_start,
        residual_history: history,
        status,
        iterates,
    })
}
