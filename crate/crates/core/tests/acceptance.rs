//! End-to-end acceptance checks. Every test prints one `PASS`/`FAIL` line
//! (directly to stdout, so it shows even when output is captured) and then
//! asserts the same condition.

use std::io::Write;
use std::time::{Duration, Instant};

use onel1::experiments::{
    estimate_phase_transition, generate_mri_pattern, generate_sparse_signal, mondrian_image, run_benchmark_suite,
    run_image_demo, BenchmarkConfig, Ensemble, ImageProblem, PhaseGrid, ReferenceCurve, TrialSpec,
};
use onel1::linalg::{dist2, dot, norm1, norm2, DenseMatrix};
use onel1::operators::{
    compose_synthesis_operator, make_partial_dct, make_partial_dct_2d, make_row_orthonormal_gaussian,
    row_orthonormal_gaussian, MaskDomain, SamplingMask, SamplingOperator, WaveletTransform,
};
use onel1::rng::{self, derive_seed};
use onel1::solvers::{
    augmented_lagrangian_value, bp_bruteforce_oracle, relative_rmse, soft_threshold, soft_threshold_scalar,
    solve_eone_l1, solve_eone_l1_expanded, solve_rone_l1, solve_rone_l1_expanded, SolverKind, SolverOptions,
};
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

fn report(id: u32, title: &str, passed: bool, detail: &str, elapsed: Duration, budget: Duration) -> bool {
    let in_time = elapsed <= budget;
    let verdict = if passed && in_time { "PASS" } else { "FAIL" };
    let line = format!(
        "{verdict} [{id:>2}] {title}: {detail} ({:.1}s, budget {:.0}s)\n",
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    passed && in_time
}

fn randn(len: usize, r: &mut rng::Rng) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(r)).collect()
}

#[test]
fn criterion_01_operator_suite() {
    let start = Instant::now();
    let mut r = rng::seeded(101);
    let mut ops: Vec<(&str, SamplingOperator)> = Vec::new();
    for (len, n) in [(64, 20), (1024, 300)] {
        let mask = SamplingMask::random(n, len, false, &mut r).unwrap();
        ops.push(("partial-dct", make_partial_dct(len, &mask).unwrap()));
    }
    ops.push(("gaussian 3x6", make_row_orthonormal_gaussian(3, 6, 7).unwrap()));
    ops.push(("gaussian 200x1000", make_row_orthonormal_gaussian(200, 1000, 8).unwrap()));
    let grid = MaskDomain::Grid { height: 64, width: 64 };
    let mask = SamplingMask::random_in(700, grid, true, &mut r).unwrap();
    let sampler = make_partial_dct_2d(&mask).unwrap();
    ops.push((
        "haar-dct",
        compose_synthesis_operator(&sampler, WaveletTransform::new(64, 64, 4).unwrap()).unwrap(),
    ));

    let mut worst_adj = 0.0f64;
    let mut worst_orth = 0.0f64;
    let mut vectors = 0;
    for (_, a) in &ops {
        for _ in 0..100 {
            let x = randn(a.cols(), &mut r);
            let y = randn(a.rows(), &mut r);
            let lhs = dot(&a.apply(&x), &y);
            let rhs = dot(&x, &a.adjoint(&y));
            worst_adj = worst_adj.max((lhs - rhs).abs() / (norm2(&x) * norm2(&y)));
            let round = a.apply(&a.adjoint(&y));
            worst_orth = worst_orth.max(dist2(&round, &y) / norm2(&y));
            vectors += 1;
        }
    }
    let ok = worst_adj <= 1e-10 && worst_orth <= 1e-10;
    let detail = format!(
        "{vectors} vector pairs over {} operators, adjoint gap {worst_adj:.1e}, AA'-I {worst_orth:.1e}",
        ops.len()
    );
    assert!(report(1, "operator suite", ok, &detail, start.elapsed(), Duration::from_secs(10)), "{detail}");
}

#[test]
fn criterion_02_oracle_equivalence() {
    let start = Instant::now();
    let opts = SolverOptions::default();
    let mut r = rng::seeded(202);
    let (mut rone_ok, mut eone_ok, mut gap_ok) = (0, 0, 0);
    let mut worst_gap = 0.0f64;
    let total = 50;
    for i in 0..total {
        let len = r.random_range(6..=12usize);
        let n = r.random_range(3..=6usize.min(len - 1));
        let k = r.random_range(1..=2usize);
        let seed = derive_seed(202, &[i]);
        let dense: DenseMatrix = if i % 2 == 0 {
            row_orthonormal_gaussian(n, len, seed).unwrap()
        } else {
            let mut mr = rng::seeded(seed);
            let mask = SamplingMask::random(n, len, false, &mut mr).unwrap();
            make_partial_dct(len, &mask).unwrap().to_dense()
        };
        let x0 = generate_sparse_signal(len, k, seed ^ 0x55).unwrap();
        let b = dense.mul_vec(&x0);
        let oracle = bp_bruteforce_oracle(&dense, &b).unwrap();
        let a = SamplingOperator::from_dense(dense);
        let xr = solve_rone_l1(&a, &b, &opts).unwrap().x_hat;
        let xe = solve_eone_l1(&a, &b, &opts).unwrap().x_hat;
        rone_ok += usize::from(relative_rmse(&xr, &oracle).unwrap() < 1e-4);
        eone_ok += usize::from(relative_rmse(&xe, &oracle).unwrap() < 1e-4);
        let best = norm1(&oracle);
        let gap = (norm1(&xr) - best).abs().max((norm1(&xe) - best).abs()) / best;
        worst_gap = worst_gap.max(gap);
        gap_ok += usize::from(gap <= 1e-3);
    }
    let ok = rone_ok >= 49 && eone_ok >= 49 && gap_ok == total as usize;
    let detail = format!(
        "rONE {rone_ok}/{total}, eONE {eone_ok}/{total} within 1e-4 of the oracle, worst l1 gap {worst_gap:.1e}"
    );
    assert!(report(2, "oracle equivalence", ok, &detail, start.elapsed(), Duration::from_secs(60)), "{detail}");
}

#[test]
fn criterion_03_matrix_free_matches_expanded_iterates() {
    let start = Instant::now();
    let opts = SolverOptions {
        keep_iterates: true,
        ..Default::default()
    };
    let mut worst = 0.0f64;
    let mut same_length = true;
    let mut compared = 0;
    for seed in 0..10u64 {
        let m = row_orthonormal_gaussian(8, 16, derive_seed(303, &[seed])).unwrap();
        let x0 = generate_sparse_signal(16, 2, derive_seed(304, &[seed])).unwrap();
        let b = m.mul_vec(&x0);
        let reference = solve_rone_l1_expanded(&m, &b, &opts).unwrap();
        let fast = solve_rone_l1(&SamplingOperator::from_dense(m), &b, &opts).unwrap();
        same_length &= fast.iterates.len() == reference.result.iterates.len();
        for (u, v) in fast.iterates.iter().zip(&reference.result.iterates) {
            worst = worst.max(dist2(u, v));
            compared += 1;
        }
    }
    let ok = same_length && worst <= 1e-10;
    let detail = format!("{compared} iterates over 10 seeds, max gap {worst:.1e}, equal lengths {same_length}");
    assert!(report(3, "per-iterate equivalence", ok, &detail, start.elapsed(), Duration::from_secs(10)), "{detail}");
}

#[test]
fn criterion_04_benchmark_cells() {
    let start = Instant::now();
    let config = BenchmarkConfig {
        solvers: vec![SolverKind::EoneL1, SolverKind::RoneL1],
        ..BenchmarkConfig::default()
    };
    assert_eq!((config.len, config.delta, config.trials), (4096, 0.2, 20));
    let run = run_benchmark_suite(&config, &SolverOptions::default()).unwrap();
    let find = |solver: &str, rho: f64| {
        run.records
            .iter()
            .find(|r| r.solver == solver && r.rho == rho)
            .unwrap()
            .clone()
    };
    let (easy_r, easy_e) = (find("rone-l1", 0.1), find("eone-l1", 0.1));
    let (hard_r, hard_e) = (find("rone-l1", 0.22), find("eone-l1", 0.22));
    let easy_ok = (5e-6..=5e-5).contains(&easy_r.rmse.mean);
    let hard_ok = hard_r.successes >= 18;
    let calls_ok =
        easy_r.operator_calls.mean < easy_e.operator_calls.mean && hard_r.operator_calls.mean < hard_e.operator_calls.mean;
    let detail = format!(
        "easy rONE mean rmse {:.2e}; hard rONE {}/20 successes; calls easy {:.0} vs {:.0}, hard {:.0} vs {:.0} (rONE vs eONE)",
        easy_r.rmse.mean,
        hard_r.successes,
        easy_r.operator_calls.mean,
        easy_e.operator_calls.mean,
        hard_r.operator_calls.mean,
        hard_e.operator_calls.mean
    );
    let ok = easy_ok && hard_ok && calls_ok;
    assert!(report(4, "benchmark cells", ok, &detail, start.elapsed(), Duration::from_secs(600)), "{detail}");
}

fn phase_grid(deltas: Vec<f64>) -> PhaseGrid {
    PhaseGrid {
        deltas,
        rho_count: 21,
        trials: 10,
        ensemble: Ensemble::PartialDct,
        len: 1024,
        master_seed: 5,
        ..PhaseGrid::desk_scale()
    }
}

#[test]
fn criterion_05_phase_transition_agrees_with_reference() {
    let start = Instant::now();
    let reference = ReferenceCurve::bundled();
    let grid = phase_grid(vec![0.2, 0.5, 0.8]);
    let run = estimate_phase_transition(&grid, SolverKind::RoneL1, &SolverOptions::default(), &reference).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for e in &run.estimates {
        let err = (e.rho_hat() - e.rho_reference).abs();
        ok &= err <= 0.1;
        parts.push(format!(
            "delta {:.1}: rho_hat {:.3} vs {:.3}{}",
            e.delta,
            e.rho_hat(),
            e.rho_reference,
            if e.is_degenerate() { " (degenerate)" } else { "" }
        ));
    }
    let detail = parts.join("; ");
    assert!(report(5, "phase transition", ok, &detail, start.elapsed(), Duration::from_secs(1800)), "{detail}");
}

#[test]
fn criterion_06_relaxed_solver_beats_ist() {
    let start = Instant::now();
    let reference = ReferenceCurve::bundled();
    let grid = phase_grid(vec![0.3]);
    let opts = SolverOptions::default();
    let rone = estimate_phase_transition(&grid, SolverKind::RoneL1, &opts, &reference).unwrap();
    let ist = estimate_phase_transition(&grid, SolverKind::IstContinuation, &opts, &reference).unwrap();
    let (a, b) = (&rone.estimates[0], &ist.estimates[0]);
    let margin = a.rho_hat() - b.rho_hat();
    let detail = format!(
        "rONE rho_hat {:.3} ({:?}), IST rho_hat {:.3} ({:?}), margin {margin:.3}",
        a.rho_hat(),
        a.fit.status,
        b.rho_hat(),
        b.fit.status
    );
    let ok = margin >= 0.05;
    assert!(report(6, "dominance over IST", ok, &detail, start.elapsed(), Duration::from_secs(1200)), "{detail}");
}

#[test]
fn criterion_07_linear_convergence_tail() {
    let start = Instant::now();
    let spec = TrialSpec {
        delta: 0.2,
        rho: 0.1,
        len: 1024,
        ensemble: Ensemble::PartialDct,
        seed: 0,
    };
    let (a, _, b) = spec.instance().unwrap();
    let opts = SolverOptions {
        keep_iterates: true,
        ..Default::default()
    };
    let res = solve_rone_l1(&a, &b, &opts).unwrap();
    let last = res.iterates.last().unwrap();
    let errs: Vec<f64> = res.iterates[..res.iterates.len() - 1]
        .iter()
        .map(|x| dist2(x, last))
        .collect();
    let tail_start = errs.len() - (errs.len() * 6).div_ceil(10);
    let pts: Vec<(f64, f64)> = errs[tail_start..]
        .iter()
        .enumerate()
        .filter(|(_, e)| **e > 0.0)
        .map(|(i, e)| ((tail_start + i) as f64, e.ln()))
        .collect();
    let (slope, r2) = linear_fit(&pts);
    let ok = res.is_converged() && r2 >= 0.9 && slope < 0.0;
    let detail = format!(
        "{} iterations, tail of {} points: slope {slope:.4}, R^2 {r2:.4}",
        res.outer_iters,
        pts.len()
    );
    assert!(report(7, "convergence tail", ok, &detail, start.elapsed(), Duration::from_secs(30)), "{detail}");
}

/// Least-squares slope and coefficient of determination.
fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, (sxy * sxy) / (sxx * syy))
}

#[test]
fn criterion_08_lagrangian_descent() {
    let start = Instant::now();
    let mut steps = 0;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let len = 12 + 2 * seed as usize;
        let n = len / 2;
        let m = row_orthonormal_gaussian(n, len, derive_seed(808, &[seed])).unwrap();
        let x0 = generate_sparse_signal(len, 2, derive_seed(809, &[seed])).unwrap();
        let b = m.mul_vec(&x0);
        let run = solve_eone_l1_expanded(&m, &b, &SolverOptions::default()).unwrap();
        for outer in &run.outer {
            let values: Vec<f64> = outer
                .steps
                .iter()
                .map(|(x, p)| augmented_lagrangian_value(x, p, &outer.y, outer.mu, &run.completion).unwrap())
                .collect();
            for w in values.windows(2) {
                let rise = w[1] - w[0];
                let slack = 1e-12 * w[0].abs().max(1.0);
                worst = worst.max(rise);
                steps += 1;
                violations += usize::from(rise > slack);
            }
        }
    }
    let ok = violations == 0 && steps > 0;
    let detail = format!("{steps} inner steps on 10 instances, {violations} increases, largest rise {worst:.1e}");
    assert!(report(8, "Lagrangian descent", ok, &detail, start.elapsed(), Duration::from_secs(30)), "{detail}");
}

#[test]
fn criterion_09_image_demo() {
    let start = Instant::now();
    let image = mondrian_image(256, 256, 0);
    let mask = generate_mri_pattern(256, 256, 7419, derive_seed(0, &[1])).unwrap();
    let problem = ImageProblem::new(image, 4, mask, 1.0, derive_seed(0, &[2])).unwrap();
    let expected_eps = (7419.0f64 + 2.0 * (2.0 * 7419.0f64).sqrt()).sqrt();
    let out = run_image_demo(&problem, SolverKind::RoneL1, &SolverOptions::default()).unwrap();
    let ok = (problem.epsilon - expected_eps).abs() <= 1e-12
        && out.relative_error < 0.12
        && out.residual_norm <= out.epsilon * (1.0 + 1e-6);
    let detail = format!(
        "error {:.4}, residual {:.3} vs epsilon {:.3}, {} iterations, solver time {:.2}s",
        out.relative_error, out.residual_norm, out.epsilon, out.solver.outer_iters, out.wall_time
    );
    assert!(report(9, "image demo", ok, &detail, start.elapsed(), Duration::from_secs(300)), "{detail}");
}

/// Minimise `lambda |x| + (x - w)^2 / 2` by repeatedly refined grid search.
fn prox_by_grid(w: f64, lambda: f64) -> f64 {
    let objective = |x: f64| lambda * x.abs() + 0.5 * (x - w) * (x - w);
    let (mut lo, mut hi) = (-w.abs() - 1.0, w.abs() + 1.0);
    let mut best = 0.0;
    for _ in 0..40 {
        let step = (hi - lo) / 200.0;
        let mut best_val = f64::INFINITY;
        for i in 0..=200 {
            let x = lo + step * i as f64;
            let v = objective(x);
            if v < best_val {
                best_val = v;
                best = x;
            }
        }
        if objective(0.0) <= best_val {
            best = 0.0;
        }
        lo = best - 2.0 * step;
        hi = best + 2.0 * step;
    }
    best
}

#[test]
fn criterion_10_soft_threshold_properties() {
    let start = Instant::now();
    let mut r = rng::seeded(1010);

    let mut prox_err = 0.0f64;
    for _ in 0..200 {
        let g: f64 = StandardNormal.sample(&mut r);
        let w = 3.0 * g;
        let lambda = r.random_range(0.0..2.0);
        prox_err = prox_err.max((soft_threshold_scalar(w, lambda) - prox_by_grid(w, lambda)).abs());
    }

    let mut worst_expansion = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let dim = r.random_range(1..20usize);
        let u = randn(dim, &mut r);
        let v = randn(dim, &mut r);
        let lambda = r.random_range(0.0..3.0);
        let su = soft_threshold(&u, lambda).unwrap();
        let sv = soft_threshold(&v, lambda).unwrap();
        worst_expansion = worst_expansion.max(dist2(&su, &sv) - dist2(&u, &v));
    }

    let mut formula_mismatch = 0;
    for _ in 0..1000 {
        let w = randn(8, &mut r);
        let lambda = r.random_range(0.0..2.0);
        let s = soft_threshold(&w, lambda).unwrap();
        for (si, wi) in s.iter().zip(&w) {
            let expect = wi.signum() * (wi.abs() - lambda).max(0.0);
            formula_mismatch += usize::from(si.to_bits() != expect.to_bits() && !(*si == 0.0 && expect == 0.0));
        }
    }
    let ok = prox_err <= 1e-6 && worst_expansion <= 1e-12 && formula_mismatch == 0;
    let detail = format!(
        "prox vs grid {prox_err:.1e}, max expansion {worst_expansion:.1e} on 1000 pairs, formula mismatches {formula_mismatch}"
    );
    assert!(report(10, "soft threshold", ok, &detail, start.elapsed(), Duration::from_secs(5)), "{detail}");
}
