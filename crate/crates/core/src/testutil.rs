//! Shared helpers for unit tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::{CubicalTensor, Permutation};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rng_range(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn random_tensor(rng: &mut ChaCha8Rng, order: usize, dim: usize) -> CubicalTensor {
    let len = dim.pow(order as u32);
    CubicalTensor::from_dense(order, dim, random_vec(rng, len)).unwrap()
}

/// Literal `(1/k!) sum_sigma A^{T_sigma}`.
pub fn brute_force_symmetrize(a: &CubicalTensor) -> CubicalTensor {
    let k = a.order();
    let mut acc = CubicalTensor::zeros(k, a.dim()).unwrap();
    let mut count = 0.0;
    for s in Permutation::all(k) {
        acc = acc.add(&a.transpose(&s).unwrap()).unwrap();
        count += 1.0;
    }
    acc.scaled(1.0 / count)
}

pub fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    (0..x.len())
        .map(|i| {
            y[i] = x[i] + h;
            let up = f(&y);
            y[i] = x[i] - h;
            let down = f(&y);
            y[i] = x[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `max |a - b| / max(1, max |b|)`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(1f64, |m, v| m.max(v.abs()));
    a.iter().zip(b).fold(0f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
