//! Validation utilities: a finite-difference Hessian, a seeded random
//! Hamiltonian generator and the Hessian timing comparison.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::PolyHamiltonian;
use crate::tensor::{entry_count, CubicalTensor, DEFAULT_MAX_ENTRIES};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;
/// Finite-difference step used by [`bench_hessian`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// Hessian of `H` at `x` by central second differences with step `h`.
/// Each off-diagonal pair is computed once and mirrored.
pub fn fd_hessian(ham: &PolyHamiltonian, x: &[f64], h: f64) -> Result<DMatrix<f64>> {
    let n = ham.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "step must be positive, got {h}"
        )));
    }
    let mut y = x.to_vec();
    let mut eval_at = |shifts: &[(usize, f64)]| -> Result<f64> {
        for &(i, s) in shifts {
            y[i] += s;
        }
        let v = ham.eval(&y);
        y.copy_from_slice(x);
        v
    };
    let f0 = eval_at(&[])?;
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let fp = eval_at(&[(i, h)])?;
        let fm = eval_at(&[(i, -h)])?;
        out[(i, i)] = (fp - 2.0 * f0 + fm) / (h * h);
        for j in 0..i {
            let fpp = eval_at(&[(i, h), (j, h)])?;
            let fpm = eval_at(&[(i, h), (j, -h)])?;
            let fmp = eval_at(&[(i, -h), (j, h)])?;
            let fmm = eval_at(&[(i, -h), (j, -h)])?;
            let v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Ok(out)
}

/// Random Hamiltonian with forms of every order `2..=order`: entries i.i.d.
/// uniform on `[-1, 1]`, then symmetrized.
pub fn random_hamiltonian(dim: usize, order: usize, rng: &mut impl Rng) -> Result<PolyHamiltonian> {
    if dim == 0 || !dim.is_multiple_of(2) {
        return Err(Error::OddDimension(dim));
    }
    if order < 2 {
        return Err(Error::OrderTooSmall {
            min: 2,
            found: order,
        });
    }
    let mut forms = Vec::with_capacity(order - 1);
    for k in 2..=order {
        let len = entry_count(k, dim)
            .filter(|&c| c <= DEFAULT_MAX_ENTRIES)
            .ok_or(Error::MemoryCapExceeded {
                order: k,
                dim,
                cap: DEFAULT_MAX_ENTRIES,
            })?;
        let data = (0..len).map(|_| rng.random_range(-1.0..=1.0)).collect();
        forms.push(CubicalTensor::from_dense(k, dim, data)?);
    }
    PolyHamiltonian::from_forms(dim, forms)
}

/// `max |a - b| / max(1, max |b|)`.
pub fn relative_difference(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchReport {
    pub dim: usize,
    pub order: usize,
    pub trials: usize,
    pub seed: u64,
    pub fd_step: f64,
    /// Median wall time of one tensor-contraction Hessian, seconds.
    pub tensor_median_s: f64,
    /// Median wall time of one finite-difference Hessian, seconds.
    pub fd_median_s: f64,
    pub speedup: f64,
    /// Largest relative entrywise difference over all trials.
    pub max_relative_difference: f64,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Time the tensor Hessian against [`fd_hessian`] on a seeded random
/// Hamiltonian, one random point per trial.
pub fn bench_hessian(dim: usize, order: usize, trials: usize, seed: u64) -> Result<BenchReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ham = random_hamiltonian(dim, order, &mut rng)?;
    let (mut tensor_t, mut fd_t) = (Vec::new(), Vec::new());
    let mut worst = 0f64;
    for _ in 0..trials {
        let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let start = Instant::now();
        let exact = ham.hessian(&x)?;
        tensor_t.push(start.elapsed().as_secs_f64());
        let start = Instant::now();
        let approx = fd_hessian(&ham, &x, DEFAULT_FD_STEP)?;
        fd_t.push(start.elapsed().as_secs_f64());
        worst = worst.max(relative_difference(&approx, &exact));
    }
    let (tensor_median_s, fd_median_s) = (median(tensor_t), median(fd_t));
    Ok(BenchReport {
        dim,
        order,
        trials,
        seed,
        fd_step: DEFAULT_FD_STEP,
        tensor_median_s,
        fd_median_s,
        speedup: fd_median_s / tensor_median_s.max(f64::MIN_POSITIVE),
        max_relative_difference: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fd_hessian_examples() {
        let h = fixtures::double_well_hamiltonian();
        let m = fd_hessian(&h, &[0.0, 0.0], 1e-4).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 4.0]);
        assert!((&m - &expected).amax() < 1e-6);
        let m = fd_hessian(&h, &[0.0, 2.0], 1e-4).unwrap();
        assert!((&m - h.hessian(&[0.0, 2.0]).unwrap()).amax() < 1e-5);
        assert!(matches!(
            fd_hessian(&h, &[0.0], 1e-4),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fd_hessian_is_exact_on_quadratics() {
        let h = fixtures::harmonic_hamiltonian();
        for step in [1e-3, 0.5, 3.0] {
            let m = fd_hessian(&h, &[0.3, -0.7], step).unwrap();
            assert!((&m - DMatrix::identity(2, 2)).amax() < 1e-8);
        }
    }

    #[test]
    fn random_hamiltonian_is_seeded() {
        let a = random_hamiltonian(4, 4, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        let b = random_hamiltonian(4, 4, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.degree(), 4);
        assert!(a
            .tensors()
            .all(|t| t.is_supersymmetric(1e-12) && t.max_abs() <= 1.0));
        assert!(random_hamiltonian(3, 4, &mut ChaCha8Rng::seed_from_u64(7)).is_err());
    }

    #[test]
    fn bench_paths_agree() {
        let r = bench_hessian(6, 4, 3, DEFAULT_SEED).unwrap();
        assert!(r.max_relative_difference < 1e-5);
        assert!(r.speedup > 0.0);
        assert!(bench_hessian(6, 4, 0, DEFAULT_SEED).is_err());
        let r2 = bench_hessian(6, 4, 3, DEFAULT_SEED).unwrap();
        assert_eq!(r.max_relative_difference, r2.max_relative_difference);
    }
}
