use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponential penalty schedule `mu_t = r^t mu_0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationSchedule {
    pub mu0: f64,
    pub r: f64,
}

impl ContinuationSchedule {
    pub fn new(mu0: f64, r: f64) -> Result<Self> {
        if !(mu0.is_finite() && mu0 > 0.0) {
            return Err(Error::invalid(format!("mu0 must be positive and finite, got {mu0}")));
        }
        if !(r.is_finite() && r > 1.0) {
            return Err(Error::invalid(format!("growth ratio r must exceed 1, got {r}")));
        }
        Ok(Self { mu0, r })
    }

    pub fn mu(&self, t: usize) -> f64 {
        self.mu0 * self.r.powi(t as i32)
    }

    /// Threshold `1 / mu_t`.
    pub fn lambda(&self, t: usize) -> f64 {
        1.0 / self.mu(t)
    }

    /// `mu_{t-1} / mu_t`; zero at `t = 0`, where it multiplies zero state.
    pub fn kappa(&self, t: usize) -> f64 {
        if t == 0 {
            0.0
        } else {
            1.0 / self.r
        }
    }
}

/// `r = 1 + n/N`, the exact solver's default.
pub fn eone_default_r(n: usize, len: usize) -> f64 {
    1.0 + n as f64 / len as f64
}

/// `r = min(1 + 0.04 n/N, 1.02)`, the relaxed solver's recommendation.
pub fn rone_default_r(n: usize, len: usize) -> f64 {
    (1.0 + 0.04 * n as f64 / len as f64).min(1.02)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Growth ratio; `None` selects the solver's default from `n/N`.
    pub r: Option<f64>,
    /// Initial penalty; `None` derives it from the `alpha`-quantile of `|A'b|`.
    pub mu0: Option<f64>,
    pub alpha: f64,
    /// Relative residual tolerance of the relaxed solver and the baselines.
    pub tau: f64,
    /// Outer tolerance of the exact solver.
    pub tau1: f64,
    /// Inner (relative change) tolerance of the exact solver.
    pub tau2: f64,
    /// Feasibility radius. When positive, iteration stops at the first
    /// `x_t` with `||A x_t - b|| <= epsilon` and the tolerances above are
    /// ignored.
    pub epsilon: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    /// AMP threshold multiplier: `lambda_t = theta ||z_t|| / sqrt(n)`.
    pub amp_theta: f64,
    /// Record every outer iterate in [`SolverResult::iterates`].
    pub keep_iterates: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            r: None,
            mu0: None,
            alpha: 0.99,
            tau: 1e-5,
            tau1: 1e-5,
            tau2: 1e-6,
            epsilon: 0.0,
            max_outer: 10_000,
            max_inner: 1_000,
            amp_theta: 2.5,
            keep_iterates: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau", self.tau),
            ("tau1", self.tau1),
            ("tau2", self.tau2),
            ("amp_theta", self.amp_theta),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0,1), got {}", self.alpha)));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::invalid(format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::invalid("iteration caps must be positive"));
        }
        if let Some(r) = self.r {
            if !(r.is_finite() && r > 1.0) {
                return Err(Error::invalid(format!("r must exceed 1, got {r}")));
            }
        }
        if let Some(mu0) = self.mu0 {
            if !(mu0.is_finite() && mu0 > 0.0) {
                return Err(Error::invalid(format!("mu0 must be positive, got {mu0}")));
            }
        }
        Ok(())
    }

    /// Stopping rule on the residual norm `||A x - b||`.
    pub(crate) fn stop_rule(&self, tol: f64, b_norm: f64) -> StopRule {
        if self.epsilon > 0.0 {
            StopRule::Feasible(self.epsilon)
        } else {
            StopRule::Relative(tol * b_norm)
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum StopRule {
    /// `||r|| < bound`
    Relative(f64),
    /// `||r|| <= bound`
    Feasible(f64),
}

impl StopRule {
    pub(crate) fn satisfied(self, residual_norm: f64) -> bool {
        match self {
            StopRule::Relative(bound) => residual_norm < bound,
            StopRule::Feasible(bound) => residual_norm <= bound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Converged,
    MaxIterations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    pub x_hat: Vec<f64>,
    pub outer_iters: usize,
    /// Total inner steps for the exact solver; equals `outer_iters` otherwise.
    pub inner_iters: usize,
    /// Combined `A` and `A'` invocations during the solve.
    pub operator_calls: u64,
    /// `||A x_t - b|| / ||b||` after every outer iteration.
    pub residual_history: Vec<f64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterates: Vec<Vec<f64>>,
}

impl SolverResult {
    pub fn is_converged(&self) -> bool {
        self.status == Status::Converged
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }
}

/// Solver selection, as used on the command line and in records.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolverKind {
    EoneL1,
    RoneL1,
    IstContinuation,
    IstFixed(f64),
    Amp,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverKind::EoneL1 => f.write_str("eone-l1"),
            SolverKind::RoneL1 => f.write_str("rone-l1"),
            SolverKind::IstContinuation => f.write_str("ist"),
            SolverKind::IstFixed(l) => write!(f, "ist-fixed:{l}"),
            SolverKind::Amp => f.write_str("amp"),
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "eone-l1" | "eone" => Ok(SolverKind::EoneL1),
            "rone-l1" | "rone" => Ok(SolverKind::RoneL1),
            "ist" | "ist-continuation" => Ok(SolverKind::IstContinuation),
            "amp" => Ok(SolverKind::Amp),
            other => match other.strip_prefix("ist-fixed:") {
                Some(l) => {
                    let lambda: f64 = l
                        .parse()
                        .map_err(|_| Error::invalid(format!("bad IST lambda {l:?}")))?;
                    if !(lambda.is_finite() && lambda >= 0.0) {
                        return Err(Error::invalid("IST lambda must be >= 0"));
                    }
                    Ok(SolverKind::IstFixed(lambda))
                }
                None => Err(Error::invalid(format!("unknown solver {s:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_is_geometric() {
        let s = ContinuationSchedule::new(0.5, 1.25).unwrap();
        assert_eq!(s.mu(0), 0.5);
        assert!((s.mu(3) - 0.5 * 1.25f64.powi(3)).abs() < 1e-15);
        for t in 1..50 {
            assert!(s.mu(t) > s.mu(t - 1));
            assert!((s.kappa(t) - s.mu(t - 1) / s.mu(t)).abs() < 1e-15);
        }
        assert!(ContinuationSchedule::new(1.0, 1.0).is_err());
        assert!(ContinuationSchedule::new(0.0, 1.1).is_err());
    }

    #[test]
    fn default_ratios() {
        assert!((eone_default_r(200, 1000) - 1.2).abs() < 1e-15);
        assert!((rone_default_r(200, 1000) - 1.008).abs() < 1e-15);
        assert_eq!(rone_default_r(1000, 1000), 1.02);
    }

    #[test]
    fn solver_names_round_trip() {
        for k in [
            SolverKind::EoneL1,
            SolverKind::RoneL1,
            SolverKind::IstContinuation,
            SolverKind::IstFixed(0.25),
            SolverKind::Amp,
        ] {
            assert_eq!(k.to_string().parse::<SolverKind>().unwrap(), k);
        }
        assert!("nesta".parse::<SolverKind>().is_err());
    }

    #[test]
    fn defaults_validate() {
        let o = SolverOptions::default();
        o.validate().unwrap();
        assert_eq!((o.tau1, o.tau2, o.tau), (1e-5, 1e-6, 1e-5));
        let bad = SolverOptions { alpha: 1.0, ..o };
        assert!(bad.validate().is_err());
    }
}
