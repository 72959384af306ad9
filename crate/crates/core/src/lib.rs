//! Orthonormal-expansion l1 solvers for noiseless basis pursuit.
//!
//! The crate is organised in four layers:
//!
//! * [`operators`]: partially orthonormal sampling operators (`A A' = I`),
//!   fast DCT-II, separable Haar wavelets and dense orthonormal completion.
//! * [`solvers`]: soft thresholding, the exact (ALM) and relaxed
//!   orthonormal-expansion solvers, IST and AMP baselines and a brute-force
//!   basis-pursuit oracle for tiny instances.
//! * [`experiments`]: phase-transition Monte Carlo, benchmark suite and the
//!   noisy image reconstruction pipeline.
//! * [`io`]: run configuration, record serialization and small text formats.
//!
//! ```
//! use onel1::operators::{make_partial_dct, SamplingMask};
//! use onel1::solvers::{solve_rone_l1, SolverOptions};
//!
//! let mask = SamplingMask::new(vec![0, 3, 5, 6, 9, 12, 14, 15], 16).unwrap();
//! let a = make_partial_dct(16, &mask).unwrap();
//! let mut x = vec![0.0; 16];
//! x[4] = 1.5;
//! let b = a.apply(&x);
//! let res = solve_rone_l1(&a, &b, &SolverOptions::default()).unwrap();
//! assert!(res.is_converged());
//! ```

pub mod error;
pub mod experiments;
pub mod io;
pub mod linalg;
pub mod operators;
pub mod rng;
pub mod solvers;

pub use error::{Error, Result};
