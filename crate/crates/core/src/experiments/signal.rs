use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;

/// Length-`len` vector with exactly `k` nonzeros at uniformly chosen
/// positions, values i.i.d. standard normal.
pub fn generate_sparse_signal(len: usize, k: usize, seed: u64) -> Result<Vec<f64>> {
    if k > len {
        return Err(Error::invalid(format!("sparsity {k} exceeds length {len}")));
    }
    let mut r = rng::seeded(seed);
    let mut x = vec![0.0; len];
    for i in index::sample(&mut r, len, k) {
        // a standard normal draw is exactly zero with probability zero,
        // but keep the support size exact regardless
        let mut v: f64 = StandardNormal.sample(&mut r);
        while v == 0.0 {
            v = StandardNormal.sample(&mut r);
        }
        x[i] = v;
    }
    Ok(x)
}

/// `b + e` with `e` i.i.d. `N(0, sigma^2)`.
pub fn add_noise(b: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid(format!("noise level must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(b.to_vec());
    }
    let mut r = rng::seeded(seed);
    Ok(b
        .iter()
        .map(|v| {
            let e: f64 = StandardNormal.sample(&mut r);
            v + sigma * e
        })
        .collect())
}

/// `ceil(fraction * total)`, tolerant of representation error in `fraction`
/// (so `0.3 * 1000` gives 300, not 301).
pub fn ceil_fraction(fraction: f64, total: usize) -> usize {
    let v = fraction * total as f64;
    let rounded = v.round();
    if (v - rounded).abs() < 1e-9 * v.abs().max(1.0) {
        rounded as usize
    } else {
        v.ceil() as usize
    }
}
