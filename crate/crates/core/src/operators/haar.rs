//! Orthonormal separable 2-D Haar transform in Mallat layout.
//!
//! One level maps the active top-left block to four quadrants:
//! approximation (top-left), horizontal detail (top-right), vertical detail
//! (bottom-left) and diagonal detail (bottom-right). The next level recurses
//! into the approximation quadrant.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WaveletTransform {
    levels: usize,
    height: usize,
    width: usize,
}

impl WaveletTransform {
    pub fn new(height: usize, width: usize, levels: usize) -> Result<Self> {
        let block = 1usize
            .checked_shl(levels as u32)
            .ok_or_else(|| Error::invalid("too many wavelet levels"))?;
        if height == 0 || width == 0 || height % block != 0 || width % block != 0 {
            return Err(Error::invalid(format!(
                "{height}x{width} image is not divisible by 2^{levels}"
            )));
        }
        Ok(Self {
            levels,
            height,
            width,
        })
    }

    pub fn levels(&self) -> usize {
        self.levels
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

    /// Analysis: image to coefficients.
    pub fn forward(&self, image: &[f64]) -> Vec<f64> {
        assert_eq!(image.len(), self.len(), "haar forward length");
        let mut out = image.to_vec();
        let mut scratch = vec![0.0; self.height.max(self.width)];
        let (mut h, mut w) = (self.height, self.width);
        for _ in 0..self.levels {
            for i in 0..h {
                let row = &mut out[i * self.width..i * self.width + w];
                analyze(row, &mut scratch[..w]);
            }
            let mut col = vec![0.0; h];
            for j in 0..w {
                for i in 0..h {
                    col[i] = out[i * self.width + j];
                }
                analyze(&mut col, &mut scratch[..h]);
                for i in 0..h {
                    out[i * self.width + j] = col[i];
                }
            }
            h /= 2;
            w /= 2;
        }
        out
    }

    /// Synthesis: coefficients to image.
    pub fn inverse(&self, coeffs: &[f64]) -> Vec<f64> {
        assert_eq!(coeffs.len(), self.len(), "haar inverse length");
        let mut out = coeffs.to_vec();
        let mut scratch = vec![0.0; self.height.max(self.width)];
        for level in (0..self.levels).rev() {
            let h = self.height >> level;
            let w = self.width >> level;
            let mut col = vec![0.0; h];
            for j in 0..w {
                for i in 0..h {
                    col[i] = out[i * self.width + j];
                }
                synthesize(&mut col, &mut scratch[..h]);
                for i in 0..h {
                    out[i * self.width + j] = col[i];
                }
            }
            for i in 0..h {
                let row = &mut out[i * self.width..i * self.width + w];
                synthesize(row, &mut scratch[..w]);
            }
        }
        out
    }
}

fn analyze(v: &mut [f64], scratch: &mut [f64]) {
    let half = v.len() / 2;
    for k in 0..half {
        let (a, b) = (v[2 * k], v[2 * k + 1]);
        scratch[k] = (a + b) * FRAC_1_SQRT_2;
        scratch[half + k] = (a - b) * FRAC_1_SQRT_2;
    }
    v.copy_from_slice(scratch);
}

fn synthesize(v: &mut [f64], scratch: &mut [f64]) {
    let half = v.len() / 2;
    for k in 0..half {
        let (s, d) = (v[k], v[half + k]);
        scratch[2 * k] = (s + d) * FRAC_1_SQRT_2;
        scratch[2 * k + 1] = (s - d) * FRAC_1_SQRT_2;
    }
    v.copy_from_slice(scratch);
}

pub fn haar2d_forward(image: &[f64], height: usize, width: usize, levels: usize) -> Result<Vec<f64>> {
    let wt = WaveletTransform::new(height, width, levels)?;
    check_len(image, &wt)?;
    Ok(wt.forward(image))
}

pub fn haar2d_inverse(coeffs: &[f64], height: usize, width: usize, levels: usize) -> Result<Vec<f64>> {
    let wt = WaveletTransform::new(height, width, levels)?;
    check_len(coeffs, &wt)?;
    Ok(wt.inverse(coeffs))
}

fn check_len(v: &[f64], wt: &WaveletTransform) -> Result<()> {
    if v.len() != wt.len() {
        return Err(Error::DimensionMismatch {
            expected: wt.len(),
            actual: v.len(),
            context: "haar image",
        });
    }
    Ok(())
}
