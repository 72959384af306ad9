use serde::{Deserialize, Serialize};

use super::trial::{run_recovery_trial, Ensemble, TrialRecord, TrialSpec, DEFAULT_SUCCESS_THRESHOLD};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::solvers::{SolverKind, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub len: usize,
    pub delta: f64,
    pub rhos: Vec<f64>,
    pub trials: usize,
    pub solvers: Vec<SolverKind>,
    pub ensemble: Ensemble,
    pub success_threshold: f64,
    pub master_seed: u64,
}

impl Default for BenchmarkConfig {
    /// Desk scale: `N = 4096`, `delta = 0.2`, an easy (`rho = 0.1`) and a
    /// hard (`rho = 0.22`) cell, twenty trials each.
    fn default() -> Self {
        Self {
            len: 1 << 12,
            delta: 0.2,
            rhos: vec![0.1, 0.22],
            trials: 20,
            solvers: vec![SolverKind::EoneL1, SolverKind::RoneL1, SolverKind::Amp],
            ensemble: Ensemble::PartialDct,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            master_seed: 0,
        }
    }
}

impl BenchmarkConfig {
    pub fn full_scale() -> Self {
        Self {
            len: 1 << 14,
            ..Self::default()
        }
    }
}

/// `(min, mean, max)` summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spread {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let (mut min, mut max, mut sum, mut count) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for v in values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
            count += 1;
        }
        if count == 0 {
            return Self {
                min: f64::NAN,
                mean: f64::NAN,
                max: f64::NAN,
            };
        }
        Self {
            min,
            mean: sum / count as f64,
            max,
        }
    }
}

/// One solver on one cell, aggregated over its trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub solver: String,
    pub delta: f64,
    pub rho: f64,
    pub n: usize,
    pub k: usize,
    pub big_n: usize,
    pub trials: usize,
    pub successes: usize,
    /// Trials whose solver returned an error.
    pub failures: usize,
    pub rmse: Spread,
    pub operator_calls: Spread,
    pub wall_time: Spread,
}

#[derive(Debug, Clone)]
pub struct BenchmarkRun {
    pub records: Vec<BenchmarkRecord>,
    pub trials: Vec<TrialRecord>,
}

/// Every solver sees the same instances: trial `t` of cell `j` uses seed
/// `derive_seed(master_seed, [j, t])`.
pub fn run_benchmark_suite(config: &BenchmarkConfig, opts: &SolverOptions) -> Result<BenchmarkRun> {
    if config.solvers.is_empty() || config.rhos.is_empty() || config.trials == 0 {
        return Err(Error::invalid("benchmark needs solvers, rho cells and trials"));
    }
    opts.validate()?;
    let mut records = Vec::new();
    let mut all_trials = Vec::new();
    for (j, &rho) in config.rhos.iter().enumerate() {
        let specs: Vec<TrialSpec> = (0..config.trials)
            .map(|t| TrialSpec {
                delta: config.delta,
                rho,
                len: config.len,
                ensemble: config.ensemble,
                seed: derive_seed(config.master_seed, &[j as u64, t as u64]),
            })
            .collect();
        let (n, k) = specs[0].dims()?;
        for &solver in &config.solvers {
            let trials: Vec<TrialRecord> = specs
                .iter()
                .map(|s| run_recovery_trial(s, solver, opts, config.success_threshold))
                .collect();
            let ok: Vec<&TrialRecord> = trials.iter().filter(|r| r.relative_rmse.is_some()).collect();
            records.push(BenchmarkRecord {
                solver: solver.to_string(),
                delta: config.delta,
                rho,
                n,
                k,
                big_n: config.len,
                trials: trials.len(),
                successes: trials.iter().filter(|r| r.success).count(),
                failures: trials.len() - ok.len(),
                rmse: Spread::of(ok.iter().filter_map(|r| r.relative_rmse)),
                operator_calls: Spread::of(ok.iter().map(|r| r.operator_calls as f64)),
                wall_time: Spread::of(ok.iter().map(|r| r.wall_time)),
            });
            all_trials.extend(trials);
        }
    }
    Ok(BenchmarkRun {
        records,
        trials: all_trials,
    })
}
