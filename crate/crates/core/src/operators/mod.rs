//! Partially orthonormal sampling operators and the transforms behind them.

mod completion;
mod dct;
mod haar;
mod sampling;

pub use completion::{orthonormal_completion, OrthonormalCompletion, MAX_COMPLETION_LEN};
pub use dct::{dct_forward, dct_inverse, Dct2Plan, DctPlan};
pub use haar::{haar2d_forward, haar2d_inverse, WaveletTransform};
pub use sampling::{
    compose_synthesis_operator, make_partial_dct, make_partial_dct_2d,
    make_row_orthonormal_gaussian, row_orthonormal_gaussian, LinearMap, MaskDomain,
    SamplingMask, SamplingOperator,
};
