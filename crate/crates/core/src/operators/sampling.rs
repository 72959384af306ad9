use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use super::dct::{Dct2Plan, DctPlan};
use super::haar::WaveletTransform;
use crate::error::{Error, Result};
use crate::linalg::{dist2, dot, norm2, DenseMatrix};
use crate::rng::{self, Rng};

/// Shape of the transform domain a mask selects from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskDomain {
    Line(usize),
    /// Row-major `height x width` coefficient grid.
    Grid { height: usize, width: usize },
}

impl MaskDomain {
    pub fn len(&self) -> usize {
        match *self {
            MaskDomain::Line(n) => n,
            MaskDomain::Grid { height, width } => height * width,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Strictly increasing set of selected transform coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplingMask {
    indices: Vec<usize>,
    domain: MaskDomain,
}

impl SamplingMask {
    /// Build a 1-D mask. Indices may arrive in any order; duplicates and
    /// out-of-range entries are rejected.
    pub fn new(indices: Vec<usize>, len: usize) -> Result<Self> {
        Self::with_domain(indices, MaskDomain::Line(len))
    }

    pub fn new_2d(indices: Vec<usize>, height: usize, width: usize) -> Result<Self> {
        Self::with_domain(indices, MaskDomain::Grid { height, width })
    }

    pub fn with_domain(mut indices: Vec<usize>, domain: MaskDomain) -> Result<Self> {
        let len = domain.len();
        if len == 0 {
            return Err(Error::invalid("mask domain is empty"));
        }
        indices.sort_unstable();
        if let Some(&last) = indices.last() {
            if last >= len {
                return Err(Error::invalid(format!(
                    "mask index {last} out of range for domain of size {len}"
                )));
            }
        }
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("mask contains duplicate indices"));
        }
        Ok(Self { indices, domain })
    }

    pub fn full(len: usize) -> Self {
        Self {
            indices: (0..len).collect(),
            domain: MaskDomain::Line(len),
        }
    }

    /// `n` indices drawn uniformly without replacement. With `force_dc`, index
    /// 0 is always included and the other `n - 1` are drawn from the rest.
    pub fn random(n: usize, len: usize, force_dc: bool, rng: &mut Rng) -> Result<Self> {
        Self::random_in(n, MaskDomain::Line(len), force_dc, rng)
    }

    pub fn random_in(n: usize, domain: MaskDomain, force_dc: bool, rng: &mut Rng) -> Result<Self> {
        let len = domain.len();
        if n > len {
            return Err(Error::invalid(format!("cannot select {n} of {len} coefficients")));
        }
        let indices = if force_dc && n > 0 {
            let mut v: Vec<usize> = index::sample(rng, len - 1, n - 1)
                .into_iter()
                .map(|i| i + 1)
                .collect();
            v.push(0);
            v
        } else {
            index::sample(rng, len, n).into_vec()
        };
        Self::with_domain(indices, domain)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn domain(&self) -> MaskDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    fn gather(&self, full: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| full[i]).collect()
    }

    fn scatter(&self, z: &[f64]) -> Vec<f64> {
        let mut full = vec![0.0; self.domain.len()];
        for (&i, &v) in self.indices.iter().zip(z) {
            full[i] = v;
        }
        full
    }
}

/// Matrix-free `rows x cols` linear map.
pub trait LinearMap: Send + Sync + fmt::Debug {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
    fn adjoint(&self, z: &[f64]) -> Vec<f64>;
}

#[derive(Debug)]
struct PartialDct {
    plan: DctPlan,
    mask: SamplingMask,
}

impl LinearMap for PartialDct {
    fn rows(&self) -> usize {
        self.mask.len()
    }
    fn cols(&self) -> usize {
        self.plan.len()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.mask.gather(&self.plan.forward(x))
    }
    fn adjoint(&self, z: &[f64]) -> Vec<f64> {
        self.plan.inverse(&self.mask.scatter(z))
    }
}

#[derive(Debug)]
struct PartialDct2 {
    plan: Dct2Plan,
    mask: SamplingMask,
}

impl LinearMap for PartialDct2 {
    fn rows(&self) -> usize {
        self.mask.len()
    }
    fn cols(&self) -> usize {
        self.plan.len()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.mask.gather(&self.plan.forward(x))
    }
    fn adjoint(&self, z: &[f64]) -> Vec<f64> {
        self.plan.inverse(&self.mask.scatter(z))
    }
}

#[derive(Debug)]
struct Dense(DenseMatrix);

impl LinearMap for Dense {
    fn rows(&self) -> usize {
        self.0.rows()
    }
    fn cols(&self) -> usize {
        self.0.cols()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.0.mul_vec(x)
    }
    fn adjoint(&self, z: &[f64]) -> Vec<f64> {
        self.0.tr_mul_vec(z)
    }
}

/// `sampler o synthesis`, with adjoint `analysis o sampler'`.
#[derive(Debug)]
struct Synthesis {
    sampler: Arc<dyn LinearMap>,
    wavelet: WaveletTransform,
}

impl LinearMap for Synthesis {
    fn rows(&self) -> usize {
        self.sampler.rows()
    }
    fn cols(&self) -> usize {
        self.wavelet.len()
    }
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.sampler.apply(&self.wavelet.inverse(x))
    }
    fn adjoint(&self, z: &[f64]) -> Vec<f64> {
        self.wavelet.forward(&self.sampler.adjoint(z))
    }
}

/// An `n x N` sampling operator with call counters.
///
/// The kernel is immutable and shared between clones; each clone counts its
/// own calls, starting from the counts of the operator it was cloned from.
pub struct SamplingOperator {
    kernel: Arc<dyn LinearMap>,
    apply_count: AtomicU64,
    adjoint_count: AtomicU64,
}

impl Clone for SamplingOperator {
    fn clone(&self) -> Self {
        Self {
            kernel: Arc::clone(&self.kernel),
            apply_count: AtomicU64::new(self.apply_count()),
            adjoint_count: AtomicU64::new(self.adjoint_count()),
        }
    }
}

impl fmt::Debug for SamplingOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SamplingOperator")
            .field("rows", &self.rows())
            .field("cols", &self.cols())
            .field("kernel", &self.kernel)
            .field("apply_count", &self.apply_count())
            .field("adjoint_count", &self.adjoint_count())
            .finish()
    }
}

impl SamplingOperator {
    pub fn from_kernel(kernel: Arc<dyn LinearMap>) -> Self {
        Self {
            kernel,
            apply_count: AtomicU64::new(0),
            adjoint_count: AtomicU64::new(0),
        }
    }

    /// Wrap a dense matrix. Row orthonormality is not checked here.
    pub fn from_dense(m: DenseMatrix) -> Self {
        Self::from_kernel(Arc::new(Dense(m)))
    }

    /// Measurement count `n`.
    pub fn rows(&self) -> usize {
        self.kernel.rows()
    }

    /// Signal length `N`.
    pub fn cols(&self) -> usize {
        self.kernel.cols()
    }

    /// `A x`. Panics if `x.len() != N`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols(), "apply: signal length");
        self.apply_count.fetch_add(1, Ordering::Relaxed);
        self.kernel.apply(x)
    }

    /// `A' z`. Panics if `z.len() != n`.
    pub fn adjoint(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), self.rows(), "adjoint: measurement length");
        self.adjoint_count.fetch_add(1, Ordering::Relaxed);
        self.kernel.adjoint(z)
    }

    pub fn apply_count(&self) -> u64 {
        self.apply_count.load(Ordering::Relaxed)
    }

    pub fn adjoint_count(&self) -> u64 {
        self.adjoint_count.load(Ordering::Relaxed)
    }

    pub fn total_calls(&self) -> u64 {
        self.apply_count() + self.adjoint_count()
    }

    pub fn kernel(&self) -> &Arc<dyn LinearMap> {
        &self.kernel
    }

    /// Materialize the matrix column by column without touching the counters.
    pub fn to_dense(&self) -> DenseMatrix {
        let (n, big_n) = (self.rows(), self.cols());
        let mut m = DenseMatrix::zeros(n, big_n);
        let mut e = vec![0.0; big_n];
        for j in 0..big_n {
            e[j] = 1.0;
            let col = self.kernel.apply(&e);
            e[j] = 0.0;
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    /// Relative deviation `||A A' v - v|| / ||v||` for one random `v`. Bypasses
    /// the counters so solver call counts reflect iterations only.
    pub fn orthonormality_defect(&self, seed: u64) -> f64 {
        let mut r = rng::seeded(seed);
        let v: Vec<f64> = (0..self.rows()).map(|_| StandardNormal.sample(&mut r)).collect();
        let nv = norm2(&v);
        if nv == 0.0 {
            return 0.0;
        }
        dist2(&self.kernel.apply(&self.kernel.adjoint(&v)), &v) / nv
    }

    /// Relative adjoint mismatch `|<A u, v> - <u, A' v>| / (||u|| ||v||)` for
    /// one random pair. Bypasses the counters.
    pub fn adjoint_defect(&self, seed: u64) -> f64 {
        let mut r = rng::seeded(seed);
        let u: Vec<f64> = (0..self.cols()).map(|_| StandardNormal.sample(&mut r)).collect();
        let v: Vec<f64> = (0..self.rows()).map(|_| StandardNormal.sample(&mut r)).collect();
        let lhs = dot(&self.kernel.apply(&u), &v);
        let rhs = dot(&u, &self.kernel.adjoint(&v));
        (lhs - rhs).abs() / (norm2(&u) * norm2(&v))
    }
}

/// Rows of the orthonormal 1-D DCT-II selected by `mask`.
pub fn make_partial_dct(len: usize, mask: &SamplingMask) -> Result<SamplingOperator> {
    match mask.domain() {
        MaskDomain::Line(m) if m == len => {}
        other => {
            return Err(Error::invalid(format!(
                "mask domain {other:?} does not match signal length {len}"
            )))
        }
    }
    Ok(SamplingOperator::from_kernel(Arc::new(PartialDct {
        plan: DctPlan::new(len),
        mask: mask.clone(),
    })))
}

/// Coefficients of the separable 2-D DCT-II selected by a grid mask; signals
/// are row-major images.
pub fn make_partial_dct_2d(mask: &SamplingMask) -> Result<SamplingOperator> {
    let MaskDomain::Grid { height, width } = mask.domain() else {
        return Err(Error::invalid("2-D partial DCT needs a grid mask"));
    };
    Ok(SamplingOperator::from_kernel(Arc::new(PartialDct2 {
        plan: Dct2Plan::new(height, width),
        mask: mask.clone(),
    })))
}

/// Dense i.i.d. standard normal `n x N` matrix with orthonormalized rows.
pub fn make_row_orthonormal_gaussian(n: usize, len: usize, seed: u64) -> Result<SamplingOperator> {
    Ok(SamplingOperator::from_dense(row_orthonormal_gaussian(n, len, seed)?))
}

pub fn row_orthonormal_gaussian(n: usize, len: usize, seed: u64) -> Result<DenseMatrix> {
    if n == 0 || n > len {
        return Err(Error::invalid(format!(
            "need 1 <= n <= N for a row-orthonormal ensemble, got n={n}, N={len}"
        )));
    }
    let mut r = rng::seeded(seed);
    let data: Vec<f64> = (0..n * len).map(|_| StandardNormal.sample(&mut r)).collect();
    let mut m = DenseMatrix::from_row_major(n, len, data)?;
    m.orthonormalize_rows()?;
    Ok(m)
}

/// `A = sampler o W'`: the operator acts on wavelet coefficients.
pub fn compose_synthesis_operator(
    sampler: &SamplingOperator,
    wavelet: WaveletTransform,
) -> Result<SamplingOperator> {
    if sampler.cols() != wavelet.len() {
        return Err(Error::DimensionMismatch {
            expected: sampler.cols(),
            actual: wavelet.len(),
            context: "wavelet size vs sampler columns",
        });
    }
    Ok(SamplingOperator::from_kernel(Arc::new(Synthesis {
        sampler: Arc::clone(sampler.kernel()),
        wavelet,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_validation() {
        assert!(SamplingMask::new(vec![0, 9], 8).is_err());
        assert!(SamplingMask::new(vec![1, 1], 8).is_err());
        let m = SamplingMask::new(vec![5, 1, 3], 8).unwrap();
        assert_eq!(m.indices(), &[1, 3, 5]);
        assert!(make_partial_dct(16, &m).is_err());
    }

    #[test]
    fn random_mask_respects_dc_convention() {
        let mut r = rng::seeded(3);
        for n in 1..20 {
            let m = SamplingMask::random(n, 20, true, &mut r).unwrap();
            assert_eq!(m.len(), n);
            assert_eq!(m.indices()[0], 0);
        }
        assert!(SamplingMask::random(21, 20, false, &mut r).is_err());
    }

    #[test]
    fn counters_track_each_call() {
        let a = make_partial_dct(8, &SamplingMask::new(vec![0, 2, 4, 6], 8).unwrap()).unwrap();
        let x = vec![1.0; 8];
        let z = a.apply(&x);
        let _ = a.adjoint(&z);
        let _ = a.adjoint(&z);
        assert_eq!((a.apply_count(), a.adjoint_count()), (1, 2));
        let c = a.clone();
        let _ = c.apply(&x);
        assert_eq!(c.apply_count(), 2);
        assert_eq!(a.apply_count(), 1);
        let _ = a.orthonormality_defect(0);
        let _ = a.to_dense();
        assert_eq!(a.total_calls(), 3);
    }

    #[test]
    fn gaussian_rejects_wide_request() {
        assert!(make_row_orthonormal_gaussian(7, 6, 0).is_err());
        assert!(make_row_orthonormal_gaussian(0, 6, 0).is_err());
    }

    #[test]
    fn composition_checks_sizes() {
        let a = make_partial_dct(64, &SamplingMask::full(64)).unwrap();
        let wt = WaveletTransform::new(4, 4, 1).unwrap();
        assert!(compose_synthesis_operator(&a, wt).is_err());
    }
}
