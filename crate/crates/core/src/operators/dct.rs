//! Orthonormal DCT-II and its inverse (DCT-III) in `O(N log N)`.
//!
//! The transform is reduced to one complex FFT of the same length (Makhoul's
//! even/odd reordering), so any length is supported. Scaling is `sqrt(1/N)`
//! for the DC coefficient and `sqrt(2/N)` for the rest, which makes the
//! transform matrix orthogonal.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

#[derive(Clone)]
pub struct DctPlan {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    // (cos, sin) of pi k / (2N)
    twiddles: Vec<(f64, f64)>,
}

impl std::fmt::Debug for DctPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DctPlan").field("len", &self.len).finish()
    }
}

impl DctPlan {
    pub fn new(len: usize) -> Self {
        assert!(len >= 1, "DCT length must be positive");
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(len);
        let inv = planner.plan_fft_inverse(len);
        let twiddles = (0..len)
            .map(|k| {
                let (s, c) = (PI * k as f64 / (2.0 * len as f64)).sin_cos();
                (c, s)
            })
            .collect();
        Self {
            len,
            fwd,
            inv,
            twiddles,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn forward_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.len;
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), n);
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for k in 0..n.div_ceil(2) {
            buf[k].re = x[2 * k];
        }
        for k in 0..n / 2 {
            buf[n - 1 - k].re = x[2 * k + 1];
        }
        self.fwd.process(&mut buf);
        let dc = (1.0 / n as f64).sqrt();
        let ac = (2.0 / n as f64).sqrt();
        for (k, (o, (c, s))) in out.iter_mut().zip(&self.twiddles).enumerate() {
            let y = buf[k].re * c + buf[k].im * s;
            *o = y * if k == 0 { dc } else { ac };
        }
    }

    pub fn inverse_into(&self, coeffs: &[f64], out: &mut [f64]) {
        let n = self.len;
        assert_eq!(coeffs.len(), n);
        assert_eq!(out.len(), n);
        let dc = (n as f64).sqrt();
        let ac = (n as f64 / 2.0).sqrt();
        let unscaled = |k: usize| -> f64 {
            match k {
                0 => coeffs[0] * dc,
                k if k < n => coeffs[k] * ac,
                _ => 0.0,
            }
        };
        let mut buf: Vec<Complex<f64>> = (0..n)
            .map(|k| {
                let (c, s) = self.twiddles[k];
                let re = unscaled(k);
                let im = if k == 0 { 0.0 } else { unscaled(n - k) };
                // e^{i theta} (re - i im)
                Complex::new(re * c + im * s, re * s - im * c)
            })
            .collect();
        self.inv.process(&mut buf);
        let norm = 1.0 / n as f64;
        for k in 0..n.div_ceil(2) {
            out[2 * k] = buf[k].re * norm;
        }
        for k in 0..n / 2 {
            out[2 * k + 1] = buf[n - 1 - k].re * norm;
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        self.forward_into(x, &mut out);
        out
    }

    pub fn inverse(&self, c: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        self.inverse_into(c, &mut out);
        out
    }
}

/// Orthonormal DCT-II of `v`.
pub fn dct_forward(v: &[f64]) -> Vec<f64> {
    DctPlan::new(v.len()).forward(v)
}

/// Inverse of [`dct_forward`].
pub fn dct_inverse(c: &[f64]) -> Vec<f64> {
    DctPlan::new(c.len()).inverse(c)
}

/// Separable 2-D orthonormal DCT-II over a row-major `height x width` grid.
#[derive(Debug, Clone)]
pub struct Dct2Plan {
    height: usize,
    width: usize,
    rows: DctPlan,
    cols: DctPlan,
}

impl Dct2Plan {
    pub fn new(height: usize, width: usize) -> Self {
        Self {
            height,
            width,
            rows: DctPlan::new(width),
            cols: DctPlan::new(height),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn len(&self) -> usize {
        self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn forward(&self, img: &[f64]) -> Vec<f64> {
        self.separable(img, true)
    }

    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        self.separable(coeffs, false)
    }

    fn separable(&self, input: &[f64], forward: bool) -> Vec<f64> {
        let (h, w) = (self.height, self.width);
        assert_eq!(input.len(), h * w);
        let mut out = vec![0.0; h * w];
        for (src, dst) in input.chunks_exact(w).zip(out.chunks_exact_mut(w)) {
            if forward {
                self.rows.forward_into(src, dst);
            } else {
                self.rows.inverse_into(src, dst);
            }
        }
        let mut col = vec![0.0; h];
        let mut tmp = vec![0.0; h];
        for j in 0..w {
            for i in 0..h {
                col[i] = out[i * w + j];
            }
            if forward {
                self.cols.forward_into(&col, &mut tmp);
            } else {
                self.cols.inverse_into(&col, &mut tmp);
            }
            for i in 0..h {
                out[i * w + j] = tmp[i];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::norm2;
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Direct O(N^2) orthonormal DCT-II matrix.
    fn dense_dct(n: usize) -> Vec<Vec<f64>> {
        (0..n)
            .map(|k| {
                let s = if k == 0 {
                    (1.0 / n as f64).sqrt()
                } else {
                    (2.0 / n as f64).sqrt()
                };
                (0..n)
                    .map(|j| s * (PI * k as f64 * (2 * j + 1) as f64 / (2.0 * n as f64)).cos())
                    .collect()
            })
            .collect()
    }

    fn randn(n: usize, seed: u64) -> Vec<f64> {
        let mut r = rng::seeded(seed);
        (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
    }

    #[test]
    fn constant_signal_maps_to_dc_only() {
        for n in [1, 2, 5, 8, 13] {
            let c = dct_forward(&vec![0.7; n]);
            assert!((c[0] - (n as f64).sqrt() * 0.7).abs() < 1e-12);
            assert!(c[1..].iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn unit_impulse_matches_direct_formula() {
        let m = dense_dct(8);
        let mut e0 = vec![0.0; 8];
        e0[0] = 1.0;
        let c = dct_forward(&e0);
        for k in 0..8 {
            assert!((c[k] - m[k][0]).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn random_vectors_match_direct_formula_and_its_transpose() {
        for n in [3, 7, 10, 12, 16, 31] {
            let m = dense_dct(n);
            let v = randn(n, n as u64);
            let c = dct_forward(&v);
            for k in 0..n {
                let expect: f64 = (0..n).map(|j| m[k][j] * v[j]).sum();
                assert!((c[k] - expect).abs() < 1e-12);
            }
            let back = dct_inverse(&v);
            for j in 0..n {
                let expect: f64 = (0..n).map(|k| m[k][j] * v[k]).sum();
                assert!((back[j] - expect).abs() < 1e-12, "n={n} j={j}");
            }
        }
    }

    #[test]
    fn inverse_of_scaled_dc_is_all_ones() {
        let n = 9;
        let mut c = vec![0.0; n];
        c[0] = (n as f64).sqrt();
        assert!(dct_inverse(&c).iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn round_trip_and_isometry() {
        for n in [1, 2, 64, 100, 1024] {
            let v = randn(n, 99);
            let plan = DctPlan::new(n);
            let c = plan.forward(&v);
            assert!((norm2(&c) - norm2(&v)).abs() < 1e-12 * norm2(&v).max(1.0) * 10.0);
            let back = plan.inverse(&c);
            let err: f64 = back.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(err < 1e-12, "n={n} err={err}");
        }
    }

    #[test]
    fn two_dimensional_transform_is_orthonormal() {
        let plan = Dct2Plan::new(8, 16);
        let img = randn(128, 5);
        let c = plan.forward(&img);
        assert!((norm2(&c) - norm2(&img)).abs() < 1e-11);
        let back = plan.inverse(&c);
        assert!(back.iter().zip(&img).all(|(a, b)| (a - b).abs() < 1e-12));
        let flat = Dct2Plan::new(4, 4).forward(&[2.0; 16]);
        assert!((flat[0] - 8.0).abs() < 1e-12);
        assert!(flat[1..].iter().all(|v| v.abs() < 1e-12));
    }
}
