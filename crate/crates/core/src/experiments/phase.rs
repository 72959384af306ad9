use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::glm::{fit_logistic_midpoint, LogisticFit};
use super::reference::ReferenceCurve;
use super::trial::{run_recovery_trial, Ensemble, TrialRecord, TrialSpec, DEFAULT_SUCCESS_THRESHOLD};
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::solvers::{SolverKind, SolverOptions};

/// Smallest and largest admissible grid `rho`.
pub const RHO_FLOOR: f64 = 0.01;
pub const RHO_CEIL: f64 = 0.99;

/// Monte Carlo design: for every `delta`, `rho_count` equispaced sparsity
/// ratios centred on the reference curve, `trials` instances per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub deltas: Vec<f64>,
    pub rho_count: usize,
    pub rho_half_width: f64,
    pub trials: usize,
    pub ensemble: Ensemble,
    pub len: usize,
    pub success_threshold: f64,
    pub master_seed: u64,
}

impl PhaseGrid {
    /// Nine `delta` values `0.1, ..., 0.9`, partial DCT with `N = 1024`, ten
    /// trials per cell.
    pub fn desk_scale() -> Self {
        Self {
            deltas: (1..=9).map(|i| i as f64 / 10.0).collect(),
            rho_count: 21,
            rho_half_width: 0.1,
            trials: 10,
            ensemble: Ensemble::PartialDct,
            len: 1024,
            success_threshold: DEFAULT_SUCCESS_THRESHOLD,
            master_seed: 0,
        }
    }

    /// 33 values `0.02, 0.05, ..., 0.98` with twenty trials per cell.
    pub fn full_scale() -> Self {
        Self {
            deltas: (0..33).map(|i| (2 + 3 * i) as f64 / 100.0).collect(),
            trials: 20,
            ..Self::desk_scale()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.deltas.is_empty() {
            return Err(Error::invalid("phase grid needs at least one delta"));
        }
        if let Some(d) = self.deltas.iter().find(|d| !(**d > 0.0 && **d <= 1.0)) {
            return Err(Error::invalid(format!("delta must lie in (0,1], got {d}")));
        }
        if self.rho_count < 2 {
            return Err(Error::invalid("need at least two rho cells per delta"));
        }
        if !(self.rho_half_width > 0.0 && self.rho_half_width < 0.5) {
            return Err(Error::invalid("rho half width must lie in (0, 0.5)"));
        }
        if self.trials == 0 || self.len == 0 {
            return Err(Error::invalid("trials and signal length must be positive"));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::invalid("success threshold must be positive"));
        }
        Ok(())
    }

    /// Equispaced cells on `[rho_T - w, rho_T + w]`, with the interval
    /// clipped to `[0.01, 0.99]` first.
    pub fn rho_grid(&self, delta: f64, reference: &ReferenceCurve) -> Vec<f64> {
        let centre = reference.rho_at(delta);
        let lo = (centre - self.rho_half_width).max(RHO_FLOOR);
        let hi = (centre + self.rho_half_width).min(RHO_CEIL);
        let steps = (self.rho_count - 1) as f64;
        (0..self.rho_count)
            .map(|i| lo + (hi - lo) * i as f64 / steps)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimate {
    pub delta: f64,
    pub rho_reference: f64,
    pub rhos: Vec<f64>,
    pub successes: Vec<usize>,
    pub trials: usize,
    pub fit: LogisticFit,
}

impl TransitionEstimate {
    pub fn rho_hat(&self) -> f64 {
        self.fit.rho_hat
    }

    pub fn is_degenerate(&self) -> bool {
        self.fit.is_degenerate()
    }
}

#[derive(Debug, Clone)]
pub struct PhaseTransitionRun {
    pub estimates: Vec<TransitionEstimate>,
    /// Ordered by `(delta, rho, trial)` regardless of execution order.
    pub records: Vec<TrialRecord>,
}

/// Run every cell of `grid` with `solver` and fit the 50% crossing per `delta`.
///
/// Trial `(i, j, t)` uses seed `derive_seed(master_seed, [i, j, t])`, so the
/// outcome does not depend on scheduling.
pub fn estimate_phase_transition(
    grid: &PhaseGrid,
    solver: SolverKind,
    opts: &SolverOptions,
    reference: &ReferenceCurve,
) -> Result<PhaseTransitionRun> {
    grid.validate()?;
    opts.validate()?;
    let rho_grids: Vec<Vec<f64>> = grid.deltas.iter().map(|&d| grid.rho_grid(d, reference)).collect();

    let mut jobs = Vec::with_capacity(grid.deltas.len() * grid.rho_count * grid.trials);
    for (i, &delta) in grid.deltas.iter().enumerate() {
        for (j, &rho) in rho_grids[i].iter().enumerate() {
            for t in 0..grid.trials {
                jobs.push((i, j, delta, rho, t));
            }
        }
    }
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(i, j, delta, rho, t)| {
            let spec = TrialSpec {
                delta,
                rho,
                len: grid.len,
                ensemble: grid.ensemble,
                seed: derive_seed(grid.master_seed, &[i as u64, j as u64, t as u64]),
            };
            run_recovery_trial(&spec, solver, opts, grid.success_threshold)
        })
        .collect();

    let per_delta = grid.rho_count * grid.trials;
    let mut estimates = Vec::with_capacity(grid.deltas.len());
    for (i, &delta) in grid.deltas.iter().enumerate() {
        let block = &records[i * per_delta..(i + 1) * per_delta];
        let successes: Vec<usize> = block
            .chunks(grid.trials)
            .map(|cell| cell.iter().filter(|r| r.success).count())
            .collect();
        let fit = fit_logistic_midpoint(&rho_grids[i], &successes, grid.trials)?;
        estimates.push(TransitionEstimate {
            delta,
            rho_reference: reference.rho_at(delta),
            rhos: rho_grids[i].clone(),
            successes,
            trials: grid.trials,
            fit,
        });
    }
    Ok(PhaseTransitionRun { estimates, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_rules() {
        let reference = ReferenceCurve::bundled();
        let g = PhaseGrid::desk_scale();
        let rhos = g.rho_grid(0.5, &reference);
        assert_eq!(rhos.len(), 21);
        let centre = reference.rho_at(0.5);
        assert!((rhos[0] - (centre - 0.1)).abs() < 1e-12);
        assert!((rhos[20] - (centre + 0.1)).abs() < 1e-12);
        assert!((rhos[10] - centre).abs() < 1e-12);
        let low = g.rho_grid(0.01, &reference);
        assert!(low.iter().all(|r| *r >= RHO_FLOOR && *r < 1.0));
        let full = PhaseGrid::full_scale();
        assert_eq!(full.deltas.len(), 33);
        assert!((full.deltas[32] - 0.98).abs() < 1e-12);
    }

    #[test]
    fn tiny_sweep_is_deterministic() {
        let grid = PhaseGrid {
            deltas: vec![0.5],
            rho_count: 3,
            trials: 2,
            len: 64,
            ..PhaseGrid::desk_scale()
        };
        let reference = ReferenceCurve::bundled();
        let opts = SolverOptions::default();
        let a = estimate_phase_transition(&grid, SolverKind::RoneL1, &opts, &reference).unwrap();
        let b = estimate_phase_transition(&grid, SolverKind::RoneL1, &opts, &reference).unwrap();
        assert_eq!(a.records.len(), 6);
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.relative_rmse.map(f64::to_bits), y.relative_rmse.map(f64::to_bits));
        }
        assert_eq!(a.estimates[0].successes, b.estimates[0].successes);
    }
}
