//! Fast end-to-end sanity checks, runnable from the command line.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::reference::ReferenceCurve;
use super::signal::generate_sparse_signal;
use crate::linalg::DenseMatrix;
use crate::operators::{
    compose_synthesis_operator, make_partial_dct, make_partial_dct_2d, make_row_orthonormal_gaussian,
    row_orthonormal_gaussian, SamplingMask, SamplingOperator, WaveletTransform,
};
use crate::rng::{self, derive_seed};
use crate::solvers::{
    bp_bruteforce_oracle, relative_rmse, soft_threshold, solve_eone_l1, solve_rone_l1, solve_rone_l1_expanded,
    SolverOptions,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelfTestCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> SelfTestCheck {
    SelfTestCheck {
        name: name.to_string(),
        passed,
        detail,
    }
}

pub fn run_selftest(seed: u64) -> Vec<SelfTestCheck> {
    vec![
        operator_check(seed),
        threshold_check(seed),
        oracle_check(seed),
        expansion_check(seed),
        reference_check(),
    ]
}

fn operator_check(seed: u64) -> SelfTestCheck {
    let mut r = rng::seeded(derive_seed(seed, &[0]));
    let mut build = || -> crate::Result<Vec<SamplingOperator>> {
        let mut ops = vec![
            make_partial_dct(64, &SamplingMask::random(20, 64, false, &mut r)?)?,
            make_row_orthonormal_gaussian(3, 6, seed)?,
        ];
        let mask = SamplingMask::random_in(
            100,
            crate::operators::MaskDomain::Grid { height: 16, width: 16 },
            true,
            &mut r,
        )?;
        let sampler = make_partial_dct_2d(&mask)?;
        ops.push(compose_synthesis_operator(&sampler, WaveletTransform::new(16, 16, 2)?)?);
        Ok(ops)
    };
    match build() {
        Ok(ops) => {
            let worst = ops
                .iter()
                .enumerate()
                .map(|(i, a)| a.orthonormality_defect(seed + i as u64).max(a.adjoint_defect(seed + i as u64)))
                .fold(0.0, f64::max);
            check("operators", worst <= 1e-10, format!("max defect {worst:.2e}"))
        }
        Err(e) => check("operators", false, e.to_string()),
    }
}

fn threshold_check(seed: u64) -> SelfTestCheck {
    let mut r = rng::seeded(derive_seed(seed, &[1]));
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let u: Vec<f64> = (0..4).map(|_| StandardNormal.sample(&mut r)).collect();
        let v: Vec<f64> = (0..4).map(|_| StandardNormal.sample(&mut r)).collect();
        let lambda = r.random_range(0.0..2.0);
        let (su, sv) = match (soft_threshold(&u, lambda), soft_threshold(&v, lambda)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return check("soft-threshold", false, "rejected valid input".into()),
        };
        let d_out = crate::linalg::dist2(&su, &sv);
        let d_in = crate::linalg::dist2(&u, &v);
        worst = worst.max(d_out - d_in);
    }
    check("soft-threshold", worst <= 1e-12, format!("max expansion {worst:.2e}"))
}

fn oracle_check(seed: u64) -> SelfTestCheck {
    let opts = SolverOptions {
        tau: 1e-9,
        tau1: 1e-9,
        tau2: 1e-11,
        ..Default::default()
    };
    let l1 = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();
    let (mut matched, mut within_gap) = (0u64, 0u64);
    let total = 10;
    for i in 0..total {
        let s = derive_seed(seed, &[2, i]);
        let run = || -> crate::Result<(bool, bool)> {
            let m = row_orthonormal_gaussian(6, 12, s)?;
            let x0 = generate_sparse_signal(12, 1, s ^ 1)?;
            let b = m.mul_vec(&x0);
            let oracle = bp_bruteforce_oracle(&m, &b)?;
            let a = SamplingOperator::from_dense(m);
            let xr = solve_rone_l1(&a, &b, &opts)?.x_hat;
            let xe = solve_eone_l1(&a, &b, &opts)?.x_hat;
            let close = relative_rmse(&xr, &oracle)? < 1e-4 && relative_rmse(&xe, &oracle)? < 1e-4;
            let best = l1(&oracle);
            let gap = (l1(&xr) - best).abs().max((l1(&xe) - best).abs()) / best;
            Ok((close, gap <= 1e-3))
        };
        if let Ok((close, gap_ok)) = run() {
            matched += u64::from(close);
            within_gap += u64::from(gap_ok);
        }
    }
    let passed = within_gap == total && matched + 1 >= total;
    check(
        "oracle",
        passed,
        format!("{matched}/{total} solutions matched, {within_gap}/{total} within l1 gap"),
    )
}

fn expansion_check(seed: u64) -> SelfTestCheck {
    let run = || -> crate::Result<f64> {
        let m: DenseMatrix = row_orthonormal_gaussian(8, 16, derive_seed(seed, &[3]))?;
        let x0 = generate_sparse_signal(16, 2, derive_seed(seed, &[4]))?;
        let b = m.mul_vec(&x0);
        let opts = SolverOptions {
            keep_iterates: true,
            max_outer: 200,
            ..Default::default()
        };
        let reference = solve_rone_l1_expanded(&m, &b, &opts)?;
        let fast = solve_rone_l1(&SamplingOperator::from_dense(m), &b, &opts)?;
        let mut worst = 0.0f64;
        for (u, v) in fast.iterates.iter().zip(&reference.result.iterates) {
            worst = worst.max(crate::linalg::dist2(u, v));
        }
        if fast.iterates.len() != reference.result.iterates.len() {
            worst = f64::INFINITY;
        }
        Ok(worst)
    };
    match run() {
        Ok(worst) => check("expansion", worst <= 1e-10, format!("max iterate gap {worst:.2e}")),
        Err(e) => check("expansion", false, e.to_string()),
    }
}

fn reference_check() -> SelfTestCheck {
    let c = ReferenceCurve::bundled();
    let increasing = c.points().collect::<Vec<_>>().windows(2).all(|w| w[1].1 > w[0].1);
    check("reference-curve", increasing, format!("{} points", c.len()))
}
