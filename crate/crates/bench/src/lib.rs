//! Shared setup for the criterion benchmarks.

use polyham_core::harness::DEFAULT_SEED;
use polyham_core::{random_hamiltonian, PolyHamiltonian, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A seeded random Hamiltonian of the given size and a point in `[-1, 1]^dim`
/// at which to differentiate it.
pub fn workload(dim: usize, order: usize) -> Result<(PolyHamiltonian, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let ham = random_hamiltonian(dim, order, &mut rng)?;
    let x = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
    Ok((ham, x))
}
