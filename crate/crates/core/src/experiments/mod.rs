//! Monte Carlo recovery experiments, the benchmark runner and the image
//! reconstruction demo.

mod benchmark;
mod glm;
mod image;
mod phase;
mod reference;
mod selftest;
mod signal;
mod trial;

pub use benchmark::{run_benchmark_suite, BenchmarkConfig, BenchmarkRecord, BenchmarkRun, Spread};
pub use glm::{fit_logistic_midpoint, FitStatus, LogisticFit};
pub use image::{
    block_image, feasibility_radius, generate_mri_pattern, low_frequency_side, mondrian_image, run_image_demo, Image,
    ImageDemoResult, ImageProblem,
};
pub use phase::{estimate_phase_transition, PhaseGrid, PhaseTransitionRun, TransitionEstimate, RHO_CEIL, RHO_FLOOR};
pub use reference::{load_reference_curve, parse_reference_curve, ReferenceCurve};
pub use selftest::{run_selftest, SelfTestCheck};
pub use signal::{add_noise, ceil_fraction, generate_sparse_signal};
pub use trial::{run_recovery_trial, Ensemble, TrialRecord, TrialSpec, DEFAULT_SUCCESS_THRESHOLD};
