use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::signal::{ceil_fraction, generate_sparse_signal};
use crate::error::{Error, Result};
use crate::operators::{make_partial_dct, make_row_orthonormal_gaussian, SamplingMask, SamplingOperator};
use crate::rng::{self, derive_seed};
use crate::solvers::{relative_rmse, solve, SolverKind, SolverOptions};

/// Success cutoff on the relative RMSE for noise-free recovery.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ensemble {
    PartialDct,
    GaussianOrthonormal,
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::PartialDct => "partial-dct",
            Ensemble::GaussianOrthonormal => "gaussian",
        })
    }
}

impl FromStr for Ensemble {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "partial-dct" | "dct" => Ok(Ensemble::PartialDct),
            "gaussian" | "gaussian-orthonormal" => Ok(Ensemble::GaussianOrthonormal),
            other => Err(Error::invalid(format!("unknown ensemble {other:?}"))),
        }
    }
}

impl Ensemble {
    /// Random `n x N` operator. Partial-DCT masks are uniform without
    /// replacement and do not force the DC row.
    pub fn build(self, n: usize, len: usize, seed: u64) -> Result<SamplingOperator> {
        match self {
            Ensemble::PartialDct => {
                let mut r = rng::seeded(seed);
                let mask = SamplingMask::random(n, len, false, &mut r)?;
                make_partial_dct(len, &mask)
            }
            Ensemble::GaussianOrthonormal => make_row_orthonormal_gaussian(n, len, seed),
        }
    }
}

/// One noise-free recovery problem: `n = ceil(delta N)`, `k = ceil(rho n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialSpec {
    pub delta: f64,
    pub rho: f64,
    pub len: usize,
    pub ensemble: Ensemble,
    pub seed: u64,
}

impl TrialSpec {
    pub fn dims(&self) -> Result<(usize, usize)> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0,1], got {}", self.delta)));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::invalid(format!("rho must lie in (0,1], got {}", self.rho)));
        }
        if self.len == 0 {
            return Err(Error::invalid("signal length must be positive"));
        }
        let n = ceil_fraction(self.delta, self.len).clamp(1, self.len);
        let k = ceil_fraction(self.rho, n).clamp(1, n);
        Ok((n, k))
    }

    /// Operator, true signal and measurements. The operator and the signal
    /// use independent streams derived from `seed`.
    pub fn instance(&self) -> Result<(SamplingOperator, Vec<f64>, Vec<f64>)> {
        let (n, k) = self.dims()?;
        let a = self.ensemble.build(n, self.len, derive_seed(self.seed, &[0]))?;
        let x0 = generate_sparse_signal(self.len, k, derive_seed(self.seed, &[1]))?;
        let b = a.apply(&x0);
        Ok((a, x0, b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub delta: f64,
    pub rho: f64,
    pub n: usize,
    pub k: usize,
    pub big_n: usize,
    pub seed: u64,
    pub solver: String,
    /// `None` when the solver failed.
    pub relative_rmse: Option<f64>,
    pub success: bool,
    pub operator_calls: u64,
    pub outer_iters: usize,
    pub wall_time: f64,
    pub status: String,
}

/// Build, solve and score one instance. Solver errors become a record with
/// status `failed: ...` instead of propagating.
pub fn run_recovery_trial(
    spec: &TrialSpec,
    solver: SolverKind,
    opts: &SolverOptions,
    success_threshold: f64,
) -> TrialRecord {
    let (n, k) = spec.dims().unwrap_or((0, 0));
    let mut rec = TrialRecord {
        delta: spec.delta,
        rho: spec.rho,
        n,
        k,
        big_n: spec.len,
        seed: spec.seed,
        solver: solver.to_string(),
        relative_rmse: None,
        success: false,
        operator_calls: 0,
        outer_iters: 0,
        wall_time: 0.0,
        status: String::new(),
    };
    let (a, x0, b) = match spec.instance() {
        Ok(v) => v,
        Err(e) => {
            rec.status = format!("failed: {e}");
            return rec;
        }
    };
    let start = Instant::now();
    let outcome = solve(solver, &a, &b, opts);
    rec.wall_time = start.elapsed().as_secs_f64();
    match outcome.and_then(|res| Ok((relative_rmse(&res.x_hat, &x0)?, res))) {
        Ok((err, res)) => {
            rec.relative_rmse = Some(err);
            rec.success = err < success_threshold;
            rec.operator_calls = res.operator_calls;
            rec.outer_iters = res.outer_iters;
            rec.status = format!("{:?}", res.status).to_lowercase();
        }
        Err(e) => rec.status = format!("failed: {e}"),
    }
    rec
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dims_follow_ceiling_rule() {
        let spec = TrialSpec {
            delta: 0.2,
            rho: 0.1,
            len: 1024,
            ensemble: Ensemble::PartialDct,
            seed: 0,
        };
        assert_eq!(spec.dims().unwrap(), (205, 21));
        let bad = TrialSpec { rho: 0.0, ..spec };
        assert!(bad.dims().is_err());
    }

    #[test]
    fn square_system_always_succeeds() {
        for ensemble in [Ensemble::PartialDct, Ensemble::GaussianOrthonormal] {
            for solver in [SolverKind::RoneL1, SolverKind::EoneL1, SolverKind::IstContinuation] {
                let spec = TrialSpec {
                    delta: 1.0,
                    rho: 0.05,
                    len: 64,
                    ensemble,
                    seed: 9,
                };
                let rec = run_recovery_trial(&spec, solver, &SolverOptions::default(), 1e-4);
                assert!(rec.success, "{ensemble} {solver}: {rec:?}");
            }
        }
    }

    #[test]
    fn errors_become_failed_records() {
        let spec = TrialSpec {
            delta: 0.5,
            rho: 0.2,
            len: 64,
            ensemble: Ensemble::PartialDct,
            seed: 1,
        };
        let opts = SolverOptions {
            tau: -1.0,
            ..Default::default()
        };
        let rec = run_recovery_trial(&spec, SolverKind::RoneL1, &opts, 1e-4);
        assert!(!rec.success);
        assert!(rec.relative_rmse.is_none());
        assert!(rec.status.starts_with("failed"));
    }

    #[test]
    fn ensemble_names() {
        for e in [Ensemble::PartialDct, Ensemble::GaussianOrthonormal] {
            assert_eq!(e.to_string().parse::<Ensemble>().unwrap(), e);
        }
    }
}
