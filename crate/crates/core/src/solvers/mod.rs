//! Basis-pursuit solvers for partially orthonormal operators.

mod amp;
mod eone;
mod expanded;
mod ist;
mod metrics;
mod options;
mod oracle;
mod rone;
mod setup;
mod threshold;

pub use amp::solve_amp;
pub use eone::solve_eone_l1;
pub use expanded::{
    augmented_lagrangian_value, solve_eone_l1_expanded, solve_rone_l1_expanded, ExpandedExactRun,
    ExpandedRun, ExpandedState, InnerTrace,
};
pub use ist::{solve_ist, IstMode};
pub use metrics::relative_rmse;
pub use options::{
    eone_default_r, rone_default_r, ContinuationSchedule, SolverKind, SolverOptions, SolverResult,
    Status,
};
pub use oracle::{bp_bruteforce_oracle, ORACLE_MAX_LEN, ORACLE_MAX_ROWS};
pub use rone::solve_rone_l1;
pub use threshold::{abs_quantile, mu0_from_quantile, soft_threshold, soft_threshold_scalar};

use crate::error::Result;
use crate::operators::SamplingOperator;

/// Dispatch on [`SolverKind`].
pub fn solve(kind: SolverKind, a: &SamplingOperator, b: &[f64], opts: &SolverOptions) -> Result<SolverResult> {
    match kind {
        SolverKind::EoneL1 => solve_eone_l1(a, b, opts),
        SolverKind::RoneL1 => solve_rone_l1(a, b, opts),
        SolverKind::IstContinuation => solve_ist(a, b, IstMode::Continuation, opts),
        SolverKind::IstFixed(lambda) => solve_ist(a, b, IstMode::FixedLambda(lambda), opts),
        SolverKind::Amp => solve_amp(a, b, opts),
    }
}
