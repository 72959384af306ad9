use std::time::Instant;

use rand::seq::index;
use rand::Rng as _;

use super::signal::add_noise;
use crate::error::{Error, Result};
use crate::linalg::{dist2, norm2};
use crate::operators::{compose_synthesis_operator, make_partial_dct_2d, SamplingMask, WaveletTransform};
use crate::rng;
use crate::solvers::{solve, SolverKind, SolverOptions, SolverResult};

/// Row-major grayscale image.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    pub height: usize,
    pub width: usize,
    pub pixels: Vec<f64>,
}

impl Image {
    pub fn new(height: usize, width: usize, pixels: Vec<f64>) -> Result<Self> {
        if pixels.len() != height * width {
            return Err(Error::DimensionMismatch {
                expected: height * width,
                actual: pixels.len(),
                context: "image pixels",
            });
        }
        Ok(Self { height, width, pixels })
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// `||self - other||_F / ||other||_F`.
    pub fn relative_error(&self, reference: &Image) -> Result<f64> {
        if self.height != reference.height || self.width != reference.width {
            return Err(Error::invalid("image shapes differ"));
        }
        let denom = norm2(&reference.pixels);
        if denom == 0.0 {
            return Err(Error::invalid("reference image is identically zero"));
        }
        Ok(dist2(&self.pixels, &reference.pixels) / denom)
    }
}

/// Mondrian-like test picture: [`block_image`] with dark rules
/// `max(1, min(h, w) / 64)` pixels wide along every split.
pub fn mondrian_image(height: usize, width: usize, seed: u64) -> Image {
    block_image(height, width, (height.min(width) / 64).max(1), seed)
}

/// Piecewise-constant picture on a 0..255 scale: recursive axis-aligned
/// splits down to blocks of at least 16 pixels (or 1/8 of the shorter side),
/// filled from a small palette. `rule_width = 0` draws no rules.
pub fn block_image(height: usize, width: usize, rule_width: usize, seed: u64) -> Image {
    const PALETTE: [f64; 6] = [235.0, 225.0, 200.0, 60.0, 150.0, 110.0];
    let mut r = rng::seeded(seed);
    let mut pixels = vec![PALETTE[0]; height * width];
    let line = rule_width;
    let min_side = (height.min(width) / 8).max(16).max(2 * line + 2);

    let mut stack = vec![(0usize, 0usize, height, width, 0usize)];
    let mut leaves = Vec::new();
    while let Some((r0, c0, h, w, depth)) = stack.pop() {
        let can_split_rows = h >= 2 * min_side;
        let can_split_cols = w >= 2 * min_side;
        if depth >= 5 || (!can_split_rows && !can_split_cols) || (depth >= 2 && r.random_bool(0.25)) {
            leaves.push((r0, c0, h, w));
            continue;
        }
        let split_rows = if can_split_rows && can_split_cols {
            if h == w { r.random_bool(0.5) } else { h > w }
        } else {
            can_split_rows
        };
        if split_rows {
            let cut = r.random_range(min_side..=h - min_side);
            stack.push((r0, c0, cut, w, depth + 1));
            stack.push((r0 + cut, c0, h - cut, w, depth + 1));
        } else {
            let cut = r.random_range(min_side..=w - min_side);
            stack.push((r0, c0, h, cut, depth + 1));
            stack.push((r0, c0 + cut, h, w - cut, depth + 1));
        }
    }
    for &(r0, c0, h, w) in &leaves {
        let colour = if r.random_bool(0.6) {
            PALETTE[r.random_range(0..3)]
        } else {
            PALETTE[r.random_range(3..PALETTE.len())]
        };
        for i in r0..r0 + h {
            for j in c0..c0 + w {
                pixels[i * width + j] = colour;
            }
        }
        if line == 0 {
            continue;
        }
        for i in r0..r0 + h {
            for j in c0..c0 + w {
                let on_bottom = i + line >= r0 + h && r0 + h < height;
                let on_right = j + line >= c0 + w && c0 + w < width;
                if on_bottom || on_right {
                    pixels[i * width + j] = 20.0;
                }
            }
        }
    }
    Image {
        height,
        width,
        pixels,
    }
}

/// Side of the fully sampled low-frequency block: `max(1, floor(sqrt(0.6 n)))`,
/// capped by the grid.
pub fn low_frequency_side(height: usize, width: usize, n: usize) -> usize {
    (((0.6 * n as f64).sqrt().floor() as usize).max(1)).min(height).min(width)
}

/// Low-frequency square (roughly 60% of the budget, DC included) plus
/// uniformly random remaining DCT coefficients. Exactly `n` indices.
pub fn generate_mri_pattern(height: usize, width: usize, n: usize, seed: u64) -> Result<SamplingMask> {
    let total = height * width;
    if total == 0 {
        return Err(Error::invalid("empty coefficient grid"));
    }
    if n == 0 || n > total {
        return Err(Error::invalid(format!("mask size {n} must lie in 1..={total}")));
    }
    let side = low_frequency_side(height, width, n);
    let mut chosen = vec![false; total];
    let mut indices = Vec::with_capacity(n);
    for i in 0..side {
        for j in 0..side {
            chosen[i * width + j] = true;
            indices.push(i * width + j);
        }
    }
    let rest: Vec<usize> = (0..total).filter(|&k| !chosen[k]).collect();
    let mut r = rng::seeded(seed);
    for pick in index::sample(&mut r, rest.len(), n - indices.len()) {
        indices.push(rest[pick]);
    }
    SamplingMask::new_2d(indices, height, width)
}

/// `sqrt(n + 2 sqrt(2n)) sigma`.
pub fn feasibility_radius(n: usize, sigma: f64) -> f64 {
    let n = n as f64;
    (n + 2.0 * (2.0 * n).sqrt()).sqrt() * sigma
}

#[derive(Debug, Clone)]
pub struct ImageProblem {
    pub image: Image,
    pub wavelet_levels: usize,
    pub mask: SamplingMask,
    pub sigma: f64,
    pub epsilon: f64,
    pub noise_seed: u64,
}

impl ImageProblem {
    pub fn new(image: Image, wavelet_levels: usize, mask: SamplingMask, sigma: f64, noise_seed: u64) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::invalid(format!("noise level must be >= 0, got {sigma}")));
        }
        let expected = crate::operators::MaskDomain::Grid {
            height: image.height,
            width: image.width,
        };
        if mask.domain() != expected {
            return Err(Error::invalid("mask grid does not match the image shape"));
        }
        WaveletTransform::new(image.height, image.width, wavelet_levels)?;
        let epsilon = feasibility_radius(mask.len(), sigma);
        Ok(Self {
            image,
            wavelet_levels,
            mask,
            sigma,
            epsilon,
            noise_seed,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ImageDemoResult {
    pub reconstruction: Image,
    pub relative_error: f64,
    /// Solver time only.
    pub wall_time: f64,
    /// `||A x_hat - b||` against the noisy measurements.
    pub residual_norm: f64,
    pub epsilon: f64,
    pub solver: SolverResult,
}

impl ImageDemoResult {
    pub fn is_feasible(&self, slack: f64) -> bool {
        self.residual_norm <= self.epsilon * (1.0 + slack)
    }
}

/// Sample the image's 2-D DCT, add noise and recover its Haar coefficients
/// with `A = F_p W'`. With `sigma > 0` the solver stops at the first iterate
/// inside the `epsilon` ball; with `sigma = 0` it uses the options'
/// noise-free tolerance.
pub fn run_image_demo(problem: &ImageProblem, solver: SolverKind, opts: &SolverOptions) -> Result<ImageDemoResult> {
    let img = &problem.image;
    let wavelet = WaveletTransform::new(img.height, img.width, problem.wavelet_levels)?;
    let sampler = make_partial_dct_2d(&problem.mask)?;
    let a = compose_synthesis_operator(&sampler, wavelet.clone())?;
    let clean = sampler.apply(&img.pixels);
    let b = add_noise(&clean, problem.sigma, problem.noise_seed)?;

    let opts = SolverOptions {
        epsilon: problem.epsilon,
        ..opts.clone()
    };
    let start = Instant::now();
    let result = solve(solver, &a, &b, &opts)?;
    let wall_time = start.elapsed().as_secs_f64();

    let ax = a.apply(&result.x_hat);
    let residual_norm = dist2(&ax, &b);
    let reconstruction = Image::new(img.height, img.width, wavelet.inverse(&result.x_hat))?;
    let relative_error = reconstruction.relative_error(img)?;
    Ok(ImageDemoResult {
        reconstruction,
        relative_error,
        wall_time,
        residual_norm,
        epsilon: problem.epsilon,
        solver: result,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_size_and_dc() {
        for (n, seed) in [(1, 0), (17, 1), (500, 2), (4096, 3), (2000, 4)] {
            let m = generate_mri_pattern(64, 64, n, seed).unwrap();
            assert_eq!(m.len(), n);
            assert_eq!(m.indices()[0], 0);
        }
        assert_eq!(generate_mri_pattern(8, 8, 64, 0).unwrap().indices(), (0..64).collect::<Vec<_>>());
        assert!(generate_mri_pattern(8, 8, 65, 0).is_err());
        assert!(generate_mri_pattern(8, 8, 0, 0).is_err());
        assert_eq!(low_frequency_side(256, 256, 7419), 66);
    }

    #[test]
    fn radius_formula() {
        let n = 7419usize;
        let expect = (n as f64 + 2.0 * (2.0 * n as f64).sqrt()).sqrt();
        assert!((feasibility_radius(n, 1.0) - expect).abs() < 1e-12);
        assert_eq!(feasibility_radius(n, 0.0), 0.0);
    }

    #[test]
    fn mondrian_is_piecewise_constant() {
        let img = mondrian_image(64, 64, 3);
        assert_eq!(img.len(), 4096);
        let mut levels: Vec<u64> = img.pixels.iter().map(|p| p.to_bits()).collect();
        levels.sort_unstable();
        levels.dedup();
        assert!(levels.len() >= 2 && levels.len() <= 7);
        assert_eq!(img, mondrian_image(64, 64, 3));
    }

    #[test]
    fn full_mask_without_noise_is_exact() {
        let img = mondrian_image(32, 32, 1);
        let mask = SamplingMask::new_2d((0..1024).collect(), 32, 32).unwrap();
        let problem = ImageProblem::new(img, 3, mask, 0.0, 0).unwrap();
        let opts = SolverOptions {
            tau: 1e-13,
            ..Default::default()
        };
        let out = run_image_demo(&problem, SolverKind::RoneL1, &opts).unwrap();
        assert!(out.relative_error < 1e-8, "{}", out.relative_error);
    }

    #[test]
    fn small_noisy_demo() {
        let img = block_image(64, 64, 0, 5);
        let n = (0.15f64 * 4096.0).ceil() as usize;
        let mask = generate_mri_pattern(64, 64, n, 11).unwrap();
        let sampler = make_partial_dct_2d(&mask).unwrap();
        let clean = sampler.apply(&img.pixels);
        let rms = norm2(&clean) / (clean.len() as f64).sqrt();
        let problem = ImageProblem::new(img, 3, mask, 0.01 * rms, 7).unwrap();
        let out = run_image_demo(&problem, SolverKind::RoneL1, &SolverOptions::default()).unwrap();
        assert!(out.is_feasible(1e-6));
        assert!(out.relative_error < 0.15, "{}", out.relative_error);
    }
}
