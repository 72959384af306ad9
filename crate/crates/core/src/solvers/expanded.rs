//! Literal expanded-basis forms of the two ALM solvers.
//!
//! These work on the square orthonormal `Phi = [A; B]` with explicit `p`
//! (full virtual measurements) and `y` (full multiplier). They exist to
//! certify the matrix-free solvers on small instances and are limited to
//! `N <= 64`.

use super::options::{eone_default_r, rone_default_r, ContinuationSchedule, SolverOptions, SolverResult, Status};
use super::threshold::{abs_quantile, shrink_in_place};
use crate::error::{Error, Result};
use crate::linalg::{dist2, dot, norm1, norm2, DenseMatrix};
use crate::operators::{orthonormal_completion, OrthonormalCompletion};

/// `L(x, p, y, mu) = ||x||_1 + <p - Phi x, y> + mu/2 ||p - Phi x||^2`.
pub fn augmented_lagrangian_value(
    x: &[f64],
    p: &[f64],
    y: &[f64],
    mu: f64,
    completion: &OrthonormalCompletion,
) -> Result<f64> {
    let len = completion.len();
    for (v, ctx) in [(x, "x"), (p, "p"), (y, "y")] {
        if v.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                actual: v.len(),
                context: ctx_name(ctx),
            });
        }
    }
    let gap: Vec<f64> = p
        .iter()
        .zip(completion.phi().mul_vec(x))
        .map(|(pi, q)| pi - q)
        .collect();
    Ok(norm1(x) + dot(&gap, y) + 0.5 * mu * dot(&gap, &gap))
}

fn ctx_name(c: &str) -> &'static str {
    match c {
        "x" => "lagrangian x",
        "p" => "lagrangian p",
        _ => "lagrangian y",
    }
}

/// State after one update of an expanded solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedState {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub y: Vec<f64>,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct ExpandedRun {
    pub result: SolverResult,
    /// One entry per outer iteration (state after the multiplier update).
    pub trace: Vec<ExpandedState>,
    pub completion: OrthonormalCompletion,
}

/// One outer step of the expanded exact solver: the inner iterates
/// `(x^j, p^j)` for `j = 0..J` at fixed `y_t`, `mu_t`.
#[derive(Debug, Clone)]
pub struct InnerTrace {
    pub mu: f64,
    pub y: Vec<f64>,
    pub steps: Vec<(Vec<f64>, Vec<f64>)>,
}

#[derive(Debug, Clone)]
pub struct ExpandedExactRun {
    pub result: SolverResult,
    pub outer: Vec<InnerTrace>,
    pub completion: OrthonormalCompletion,
}

struct Setup {
    completion: OrthonormalCompletion,
    schedule: ContinuationSchedule,
    b_norm: f64,
}

fn setup(a: &DenseMatrix, b: &[f64], opts: &SolverOptions, default_r: fn(usize, usize) -> f64) -> Result<Setup> {
    opts.validate()?;
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.len(),
            context: "measurement vector",
        });
    }
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return Err(Error::invalid("measurement vector is zero"));
    }
    let completion = orthonormal_completion(a)?;
    let mu0 = match opts.mu0 {
        Some(m) => m,
        None => {
            let q = abs_quantile(&a.tr_mul_vec(b), opts.alpha);
            if !(q > 0.0) {
                return Err(Error::invalid("alpha-quantile of |A'b| is zero"));
            }
            1.0 / q
        }
    };
    let r = opts.r.unwrap_or_else(|| default_r(a.rows(), a.cols()));
    Ok(Setup {
        completion,
        schedule: ContinuationSchedule::new(mu0, r)?,
        b_norm,
    })
}

/// `S_{1/mu}(Phi'(p + y/mu))`
fn x_update(phi: &DenseMatrix, p: &[f64], y: &[f64], mu: f64) -> Vec<f64> {
    let shifted: Vec<f64> = p.iter().zip(y).map(|(pi, yi)| pi + yi / mu).collect();
    let mut x = phi.tr_mul_vec(&shifted);
    shrink_in_place(&mut x, 1.0 / mu);
    x
}

/// `[b; tail(Phi x - y/mu)]`, returning `Phi x` too.
fn p_update(phi: &DenseMatrix, x: &[f64], y: &[f64], mu: f64, b: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let phi_x = phi.mul_vec(x);
    let n = b.len();
    let mut p: Vec<f64> = phi_x.iter().zip(y).map(|(q, yi)| q - yi / mu).collect();
    p[..n].copy_from_slice(b);
    (p, phi_x)
}

fn observed_residual(phi_x: &[f64], b: &[f64]) -> f64 {
    dist2(&phi_x[..b.len()], b)
}

/// Relaxed solver run literally on the expanded basis:
///
/// ```text
/// x_{t+1} = S_{1/mu_t}(Phi'(p_t + y_t/mu_t))
/// p_{t+1} = [b; tail(Phi x_{t+1} - y_t/mu_t)]
/// y_{t+1} = y_t + mu_t (p_{t+1} - Phi x_{t+1})
/// ```
pub fn solve_rone_l1_expanded(a: &DenseMatrix, b: &[f64], opts: &SolverOptions) -> Result<ExpandedRun> {
    let Setup {
        completion,
        schedule,
        b_norm,
    } = setup(a, b, opts, rone_default_r)?;
    let phi = completion.phi().clone();
    let len = a.cols();
    let stop = opts.stop_rule(opts.tau, b_norm);

    let mut x = vec![0.0; len];
    let mut p = vec![0.0; len];
    p[..b.len()].copy_from_slice(b);
    let mut y = vec![0.0; len];
    let mut trace = Vec::new();
    let mut history = Vec::new();
    let mut iterates = Vec::new();
    let mut status = Status::MaxIterations;
    let mut products = 0u64;

    for t in 0..opts.max_outer {
        let mu = schedule.mu(t);
        x = x_update(&phi, &p, &y, mu);
        let (p_next, phi_x) = p_update(&phi, &x, &y, mu, b);
        products += 2;
        p = p_next;
        for i in 0..len {
            y[i] += mu * (p[i] - phi_x[i]);
        }
        let res = observed_residual(&phi_x, b);
        history.push(res / b_norm);
        if opts.keep_iterates {
            iterates.push(x.clone());
        }
        trace.push(ExpandedState {
            x: x.clone(),
            p: p.clone(),
            y: y.clone(),
            mu,
        });
        if stop.satisfied(res) {
            status = Status::Converged;
            break;
        }
    }

    Ok(ExpandedRun {
        result: SolverResult {
            x_hat: x,
            outer_iters: history.len(),
            inner_iters: history.len(),
            operator_calls: products,
            residual_history: history,
            status,
            iterates,
        },
        trace,
        completion,
    })
}

/// Exact solver run literally on the expanded basis, recording every inner
/// iterate. Inner loops stop on `||x^{j+1} - x^j|| / ||x^j|| < tau2`.
pub fn solve_eone_l1_expanded(a: &DenseMatrix, b: &[f64], opts: &SolverOptions) -> Result<ExpandedExactRun> {
    let Setup {
        completion,
        schedule,
        b_norm,
    } = setup(a, b, opts, eone_default_r)?;
    let phi = completion.phi().clone();
    let len = a.cols();
    let stop = opts.stop_rule(opts.tau1, b_norm);

    let mut x = vec![0.0; len];
    let mut p = vec![0.0; len];
    p[..b.len()].copy_from_slice(b);
    let mut y = vec![0.0; len];
    let mut outer = Vec::new();
    let mut history = Vec::new();
    let mut iterates = Vec::new();
    let mut status = Status::MaxIterations;
    let mut products = 0u64;
    let mut inner_total = 0;

    for t in 0..opts.max_outer {
        let mu = schedule.mu(t);
        let mut steps = vec![(x.clone(), p.clone())];
        let mut phi_x = phi.mul_vec(&x);
        for _ in 0..opts.max_inner {
            let x_next = x_update(&phi, &p, &y, mu);
            let (p_next, px) = p_update(&phi, &x_next, &y, mu, b);
            products += 2;
            inner_total += 1;
            let change = dist2(&x_next, &x);
            let scale = norm2(&x);
            x = x_next;
            p = p_next;
            phi_x = px;
            steps.push((x.clone(), p.clone()));
            let small = if scale > 0.0 {
                change / scale < opts.tau2
            } else {
                change < opts.tau2
            };
            if small {
                break;
            }
        }
        outer.push(InnerTrace {
            mu,
            y: y.clone(),
            steps,
        });
        for i in 0..len {
            y[i] += mu * (p[i] - phi_x[i]);
        }
        let res = observed_residual(&phi_x, b);
        history.push(res / b_norm);
        if opts.keep_iterates {
            iterates.push(x.clone());
        }
        if stop.satisfied(res) {
            status = Status::Converged;
            break;
        }
    }

    Ok(ExpandedExactRun {
        result: SolverResult {
            x_hat: x,
            outer_iters: history.len(),
            inner_iters: inner_total,
            operator_calls: products,
            residual_history: history,
            status,
            iterates,
        },
        outer,
        completion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::row_orthonormal_gaussian;
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    fn randn(n: usize, r: &mut rng::Rng) -> Vec<f64> {
        (0..n).map(|_| StandardNormal.sample(r)).collect()
    }

    #[test]
    fn lagrangian_special_cases() {
        let a = row_orthonormal_gaussian(3, 6, 1).unwrap();
        let c = orthonormal_completion(&a).unwrap();
        let mut r = rng::seeded(2);
        let x = randn(6, &mut r);
        let p = c.phi().mul_vec(&x);
        let l = augmented_lagrangian_value(&x, &p, &[0.0; 6], 3.0, &c).unwrap();
        assert!((l - norm1(&x)).abs() < 1e-12);
        let p = randn(6, &mut r);
        let l = augmented_lagrangian_value(&[0.0; 6], &p, &[0.0; 6], 3.0, &c).unwrap();
        assert!((l - 1.5 * dot(&p, &p)).abs() < 1e-12);
        assert!(augmented_lagrangian_value(&[0.0; 5], &p, &p, 1.0, &c).is_err());
    }

    #[test]
    fn lagrangian_matches_completed_square() {
        let a = row_orthonormal_gaussian(4, 9, 5).unwrap();
        let c = orthonormal_completion(&a).unwrap();
        let mut r = rng::seeded(6);
        for _ in 0..20 {
            let (x, p, y) = (randn(9, &mut r), randn(9, &mut r), randn(9, &mut r));
            let g: f64 = StandardNormal.sample(&mut r);
            let mu = 0.1 + 5.0 * g.abs().min(3.0);
            let direct = augmented_lagrangian_value(&x, &p, &y, mu, &c).unwrap();
            let phi_x = c.phi().mul_vec(&x);
            let sq: f64 = (0..9)
                .map(|i| {
                    let v = p[i] - phi_x[i] + y[i] / mu;
                    v * v
                })
                .sum();
            let completed = norm1(&x) + 0.5 * mu * sq - dot(&y, &y) / (2.0 * mu);
            assert!((direct - completed).abs() < 1e-12 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn multiplier_tail_and_observed_block_invariants() {
        let a = row_orthonormal_gaussian(6, 12, 3).unwrap();
        let mut x0 = vec![0.0; 12];
        x0[2] = 1.0;
        x0[8] = -0.5;
        let b = a.mul_vec(&x0);
        let run = solve_rone_l1_expanded(&a, &b, &SolverOptions::default()).unwrap();
        assert!(run.result.is_converged());
        for s in &run.trace {
            assert!(s.y[6..].iter().all(|v| v.abs() < 1e-12));
            assert!(s.p[..6].iter().zip(&b).all(|(p, q)| p == q));
        }
    }

    #[test]
    fn too_large_problems_are_rejected() {
        let a = DenseMatrix::zeros(2, 65);
        assert!(solve_rone_l1_expanded(&a, &[1.0, 0.0], &SolverOptions::default()).is_err());
    }
}
