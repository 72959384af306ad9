use super::options::{rone_default_r, SolverOptions, SolverResult, Status};
use super::setup::{check_problem, prepare, residual_norm};
use super::threshold::shrink_in_place;
use crate::error::{Error, Result};
use crate::linalg::{dist2, norm2};
use crate::operators::SamplingOperator;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IstMode {
    /// Constant threshold; stops when `||x_{t+1} - x_t|| / ||x_t|| < tau2`
    /// or on the residual rule.
    FixedLambda(f64),
    /// `lambda_t = 1/mu_t` on the relaxed solver's schedule and stopping rule.
    Continuation,
}

/// Iterative soft thresholding from `x_0 = 0`:
/// `x_{t+1} = S_{lambda_t}(x_t + A'(b - A x_t))`.
pub fn solve_ist(
    a: &SamplingOperator,
    b: &[f64],
    mode: IstMode,
    opts: &SolverOptions,
) -> Result<SolverResult> {
    let (lambda_at, b_norm, calls_at_start): (Box<dyn Fn(usize) -> f64>, f64, u64) = match mode {
        IstMode::Continuation => {
            let prep = prepare(a, b, opts, rone_default_r)?;
            let sched = prep.schedule;
            (Box::new(move |t| sched.lambda(t)), prep.b_norm, prep.calls_at_start)
        }
        IstMode::FixedLambda(lambda) => {
            if !(lambda.is_finite() && lambda >= 0.0) {
                return Err(Error::invalid(format!("IST threshold must be >= 0, got {lambda}")));
            }
            let start = a.total_calls();
            check_problem(a, b, opts)?;
            let b_norm = norm2(b);
            if b_norm == 0.0 {
                return Err(Error::invalid("measurement vector is zero"));
            }
            (Box::new(move |_| lambda), b_norm, start)
        }
    };
    let stop = opts.stop_rule(opts.tau, b_norm);
    let mut x = vec![0.0; a.cols()];
    let mut ax = vec![0.0; a.rows()];
    let mut history = Vec::new();
    let mut iterates = Vec::new();
    let mut status = Status::MaxIterations;

    for t in 0..opts.max_outer {
        let z: Vec<f64> = b.iter().zip(&ax).map(|(bi, p)| bi - p).collect();
        let mut x_next = a.adjoint(&z);
        for (g, xi) in x_next.iter_mut().zip(&x) {
            *g += xi;
        }
        shrink_in_place(&mut x_next, lambda_at(t));
        let change = dist2(&x_next, &x);
        let scale = norm2(&x);
        x = x_next;
        ax = a.apply(&x);

        let res = residual_norm(&ax, b);
        history.push(res / b_norm);
        if opts.keep_iterates {
            iterates.push(x.clone());
        }
        let stalled = matches!(mode, IstMode::FixedLambda(_))
            && t > 0
            && if scale > 0.0 {
                change / scale < opts.tau2
            } else {
                change < opts.tau2
            };
        if stop.satisfied(res) || stalled {
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
