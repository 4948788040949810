//! Equilibria and their stability.
//!
//! A strict local extremum of `H` is Lyapunov stable (Dirichlet), so an
//! equilibrium whose Hessian of `H` is definite is classified `Stable`.
//! Otherwise the linearization `J * Hess H` is inspected: an eigenvalue with
//! positive real part makes the point `Unstable`. An indefinite Hessian on
//! its own proves nothing (two oscillators with opposite energy signs are
//! stable), so anything else is `Inconclusive`.
//!
//! Definiteness of higher-order forms is estimated by optimizing `B x^k`
//! over the unit sphere from many starting points. Those verdicts are
//! numerical, not certificates.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{symplectic_j, PolyHamiltonian, PolySystem};
use crate::linalg::{eigenvalues, inf_norm, solve, symmetric_eigen};
use crate::tensor::CubicalTensor;

/// Default number of random starts for sphere optimization.
pub const DEFAULT_RESTARTS: usize = 64;

const SPHERE_MAX_ITER: usize = 500;
const SPHERE_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Definiteness {
    PositiveDefinite,
    NegativeDefinite,
    Indefinite,
    Semidefinite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DefinitenessVerdict {
    pub kind: Definiteness,
    /// Smallest value found of the form on the unit sphere (smallest
    /// eigenvalue for matrices).
    pub min: f64,
    pub max: f64,
    pub min_witness: Vec<f64>,
    pub max_witness: Vec<f64>,
    /// True when the extremes come from optimization rather than an exact
    /// eigensolve.
    pub heuristic: bool,
}

impl DefinitenessVerdict {
    fn classify(min: f64, max: f64, tol: f64) -> Definiteness {
        if min > tol {
            Definiteness::PositiveDefinite
        } else if max < -tol {
            Definiteness::NegativeDefinite
        } else if min < -tol && max > tol {
            Definiteness::Indefinite
        } else {
            Definiteness::Semidefinite
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Classification {
    Stable,
    Unstable,
    Inconclusive,
}

/// Which criterion decided a [`StabilityVerdict`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rationale {
    /// Origin, `2 B_2` definite.
    OriginQuadraticForm,
    /// Non-zero equilibrium with definite Hessian of `H`.
    HessianDefinite,
    /// Linearization has an eigenvalue with positive real part.
    LinearizationUnstable,
    NoCriterion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityVerdict {
    pub point: Vec<f64>,
    pub classification: Classification,
    pub hessian_eigenvalues: Vec<f64>,
    pub definiteness: Definiteness,
    /// Eigenvalues of `J * Hess H` as `[re, im]` pairs.
    pub linearization_spectrum: Vec<[f64; 2]>,
    pub rationale: Rationale,
}

/// `||f(x)||_inf <= tol * max(1, ||x||_inf)`.
pub fn is_equilibrium(sys: &PolySystem, x: &[f64], tol: f64) -> Result<bool> {
    let f = sys.eval_rhs(x)?;
    Ok(inf_norm(&f) <= tol * inf_norm(x).max(1.0))
}

/// Newton's method on the vector field, with the Jacobian assembled from
/// tensor contractions.
pub fn newton_refine(sys: &PolySystem, x0: &[f64], max_iter: usize, tol: f64) -> Result<Vec<f64>> {
    let mut x = x0.to_vec();
    for _ in 0..=max_iter {
        let f = sys.eval_rhs(&x)?;
        if inf_norm(&f) <= tol * inf_norm(&x).max(1.0) {
            return Ok(x);
        }
        let jac = sys.jacobian_general(&x)?;
        let neg_f: Vec<f64> = f.iter().map(|v| -v).collect();
        let step = solve(&jac, &neg_f)?;
        for (xi, s) in x.iter_mut().zip(step) {
            *xi += s;
        }
    }
    Err(Error::NoConvergence { step: None })
}

/// Definiteness of a symmetric matrix from its spectrum.
pub fn matrix_definiteness(m: &DMatrix<f64>, tol: f64) -> Result<DefinitenessVerdict> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    let deviation = (m - m.transpose()).amax();
    if deviation > tol * m.amax().max(1.0) {
        return Err(Error::NotSymmetric { deviation });
    }
    let sym = (m + m.transpose()) * 0.5;
    let (vals, vecs) = symmetric_eigen(&sym);
    let (min, max) = (vals[0], vals[vals.len() - 1]);
    Ok(DefinitenessVerdict {
        kind: DefinitenessVerdict::classify(min, max, tol),
        min,
        max,
        min_witness: vecs[0].clone(),
        max_witness: vecs[vecs.len() - 1].clone(),
        heuristic: false,
    })
}

/// Stability of an equilibrium `x` of the system generated by `h`.
pub fn classify_equilibrium(h: &PolyHamiltonian, x: &[f64], tol: f64) -> Result<StabilityVerdict> {
    let j = symplectic_j(h.dim())?;
    let sys = h.build_system()?;
    if !is_equilibrium(&sys, x, tol)? {
        return Err(Error::NotAnEquilibrium {
            point: x.to_vec(),
            residual: inf_norm(&sys.eval_rhs(x)?),
        });
    }
    let hess = h.hessian(x)?;
    let def = matrix_definiteness(&hess, tol)?;
    let (hessian_eigenvalues, _) = symmetric_eigen(&((&hess + hess.transpose()) * 0.5));
    let lin = j.matrix() * &hess;
    let spectrum = eigenvalues(&lin);
    let max_re = spectrum.iter().fold(f64::NEG_INFINITY, |m, e| m.max(e.re));
    let at_origin = x.iter().all(|&v| v == 0.0);

    let (classification, rationale) = match def.kind {
        Definiteness::PositiveDefinite | Definiteness::NegativeDefinite => (
            Classification::Stable,
            if at_origin {
                Rationale::OriginQuadraticForm
            } else {
                Rationale::HessianDefinite
            },
        ),
        _ if max_re > tol * lin.amax().max(1.0) => {
            (Classification::Unstable, Rationale::LinearizationUnstable)
        }
        _ => (Classification::Inconclusive, Rationale::NoCriterion),
    };
    Ok(StabilityVerdict {
        point: x.to_vec(),
        classification,
        hessian_eigenvalues,
        definiteness: def.kind,
        linearization_spectrum: spectrum.iter().map(|e| [e.re, e.im]).collect(),
        rationale,
    })
}

fn normalize(v: &mut [f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Local maximum of `x -> B x^k` on the unit sphere by a shifted power
/// iteration `x <- normalize(B x^(k-1) + alpha x)`. The shift is chosen from
/// the local curvature and doubled whenever a step fails to ascend.
fn sphere_ascent(b: &CubicalTensor, start: &[f64]) -> (f64, Vec<f64>) {
    let k = b.order();
    let frob = b.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = start.to_vec();
    normalize(&mut x);
    let mut f = b.form(&x).expect("dimension checked");
    for _ in 0..SPHERE_MAX_ITER {
        let g = b.tvp_vector(&x).expect("dimension checked");
        let curv = b
            .tvp(&x, k - 2)
            .expect("dimension checked")
            .to_matrix()
            .expect("order 2");
        let (vals, _) = symmetric_eigen(&curv);
        let mut alpha = (1e-3 * frob - (k as f64 - 1.0) * vals[0]).max(0.0);
        let mut accepted = None;
        for _ in 0..60 {
            let mut y: Vec<f64> = g.iter().zip(&x).map(|(gi, xi)| gi + alpha * xi).collect();
            if normalize(&mut y) {
                let fy = b.form(&y).expect("dimension checked");
                if fy >= f - 1e-15 * f.abs().max(1.0) {
                    accepted = Some((fy, y));
                    break;
                }
            }
            alpha = 2.0 * alpha + frob;
        }
        let Some((fy, y)) = accepted else { break };
        let moved = y
            .iter()
            .zip(&x)
            .fold(0f64, |m, (a, c)| m.max((a - c).abs()));
        x = y;
        let done = (fy - f).abs() <= 1e-15 * fy.abs().max(1.0) && moved < 1e-12;
        f = fy;
        if done {
            break;
        }
    }
    (f, x)
}

fn sphere_starts(dim: usize, restarts: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SPHERE_SEED);
    let mut starts = Vec::with_capacity(2 * dim + restarts);
    for i in 0..dim {
        for sign in [1.0, -1.0] {
            let mut e = vec![0.0; dim];
            e[i] = sign;
            starts.push(e);
        }
    }
    while starts.len() < 2 * dim + restarts {
        let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if v.iter().any(|&c| c != 0.0) {
            starts.push(v);
        }
    }
    starts
}

/// Definiteness of the form `B x^k` for even `k` and supersymmetric `B`.
///
/// Order 2 uses the exact eigensolve. Higher orders estimate the extremes of
/// `B x^k` on the unit sphere from the coordinate axes plus `restarts`
/// seeded random starts; the verdict is marked heuristic.
pub fn tensor_definiteness(
    b: &CubicalTensor,
    restarts: usize,
    tol: f64,
) -> Result<DefinitenessVerdict> {
    if !b.order().is_multiple_of(2) {
        return Err(Error::OddOrder(b.order()));
    }
    let (deviation, _) = b.supersymmetry_defect();
    if deviation > tol * b.max_abs().max(1.0) {
        return Err(Error::NotSupersymmetric { deviation });
    }
    if b.order() == 2 {
        return matrix_definiteness(&b.to_matrix()?, tol);
    }
    let neg = b.scaled(-1.0);
    let mut best_max = (f64::NEG_INFINITY, vec![]);
    let mut best_min = (f64::INFINITY, vec![]);
    for start in sphere_starts(b.dim(), restarts) {
        let (fmax, xmax) = sphere_ascent(b, &start);
        if fmax > best_max.0 {
            best_max = (fmax, xmax);
        }
        let (fneg, xmin) = sphere_ascent(&neg, &start);
        if -fneg < best_min.0 {
            best_min = (-fneg, xmin);
        }
    }
    let scale_tol = tol * b.max_abs().max(1.0);
    Ok(DefinitenessVerdict {
        kind: DefinitenessVerdict::classify(best_min.0, best_max.0, scale_tol),
        min: best_min.0,
        max: best_max.0,
        min_witness: best_min.1,
        max_witness: best_max.1,
        heuristic: true,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DefinitenessMethod {
    /// Combined from per-tensor verdicts of the homogeneous parts.
    TensorCombination,
    /// Odd-order terms present; classification comes from sampling only.
    OddOrderPresent,
    /// Per-tensor verdicts were mixed; classification comes from sampling.
    SphereSampling,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HamiltonianDefiniteness {
    pub kind: Definiteness,
    /// False when no tensor-level argument backs `kind`.
    pub certified: bool,
    pub method: DefinitenessMethod,
    /// Orders of nonzero odd-order tensors.
    pub odd_orders: Vec<usize>,
    pub per_tensor: Vec<(usize, DefinitenessVerdict)>,
    /// Extreme sampled values of `H(x) / |x|^2` when sampling was used.
    pub sampled_range: Option<[f64; 2]>,
}

fn sample_definiteness(
    h: &PolyHamiltonian,
    restarts: usize,
    tol: f64,
) -> Result<(Definiteness, [f64; 2])> {
    let n = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(SPHERE_SEED ^ 0xabc);
    let mut dirs = sphere_starts(n, restarts * n.max(1));
    for d in &mut dirs {
        normalize(d);
    }
    let (mut pos, mut neg) = (false, false);
    let (mut nonpos, mut nonneg) = (false, false);
    let mut range = [f64::INFINITY, f64::NEG_INFINITY];
    for r in [1e-2, 1e-1, 1.0, 10.0] {
        let mut extra: Vec<Vec<f64>> = (0..restarts)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        extra.retain_mut(|v| normalize(v));
        let values: Vec<f64> = dirs
            .iter()
            .chain(&extra)
            .map(|u| {
                let x: Vec<f64> = u.iter().map(|c| c * r).collect();
                h.eval(&x).map(|v| v / (r * r))
            })
            .collect::<Result<_>>()?;
        let scale = values.iter().fold(1f64, |m, v| m.max(v.abs()));
        for v in values {
            range[0] = range[0].min(v);
            range[1] = range[1].max(v);
            if v > tol * scale {
                pos = true;
            } else if v < -tol * scale {
                neg = true;
            } else if v >= 0.0 {
                nonneg = true;
            } else {
                nonpos = true;
            }
        }
    }
    let kind = match (pos, neg) {
        (true, true) => Definiteness::Indefinite,
        (true, false) if !(nonneg || nonpos) => Definiteness::PositiveDefinite,
        (false, true) if !(nonneg || nonpos) => Definiteness::NegativeDefinite,
        _ => Definiteness::Semidefinite,
    };
    Ok((kind, range))
}

/// Definiteness of `H` built from its homogeneous parts: with no odd-order
/// terms, a sum of positive semidefinite forms is positive semidefinite, and
/// positive definite once any part is positive definite. Mixed or odd cases
/// fall back to sampling `H` on spheres of several radii.
pub fn hamiltonian_definiteness(
    h: &PolyHamiltonian,
    restarts: usize,
    tol: f64,
) -> Result<HamiltonianDefiniteness> {
    let odd_orders: Vec<usize> = h
        .tensors()
        .filter(|b| b.order() % 2 == 1 && !b.is_zero())
        .map(CubicalTensor::order)
        .collect();
    if !odd_orders.is_empty() {
        let (kind, range) = sample_definiteness(h, restarts, tol)?;
        return Ok(HamiltonianDefiniteness {
            kind,
            certified: false,
            method: DefinitenessMethod::OddOrderPresent,
            odd_orders,
            per_tensor: vec![],
            sampled_range: Some(range),
        });
    }
    let per_tensor: Vec<(usize, DefinitenessVerdict)> = h
        .tensors()
        .filter(|b| !b.is_zero())
        .map(|b| Ok((b.order(), tensor_definiteness(b, restarts, tol)?)))
        .collect::<Result<_>>()?;
    let kinds: Vec<Definiteness> = per_tensor.iter().map(|(_, v)| v.kind).collect();
    let side = |strict: Definiteness, weak_ok: &dyn Fn(&DefinitenessVerdict) -> bool| {
        per_tensor
            .iter()
            .all(|(_, v)| v.kind == strict || (v.kind == Definiteness::Semidefinite && weak_ok(v)))
    };
    let psd = side(Definiteness::PositiveDefinite, &|v| {
        v.min >= -v.max.abs().max(tol)
    });
    let nsd = side(Definiteness::NegativeDefinite, &|v| {
        v.max <= v.min.abs().max(tol)
    });
    let combined = if per_tensor.is_empty() {
        Some(Definiteness::Semidefinite)
    } else if psd && kinds.contains(&Definiteness::PositiveDefinite) {
        Some(Definiteness::PositiveDefinite)
    } else if nsd && kinds.contains(&Definiteness::NegativeDefinite) {
        Some(Definiteness::NegativeDefinite)
    } else if psd || nsd {
        Some(Definiteness::Semidefinite)
    } else {
        None
    };
    match combined {
        Some(kind) => Ok(HamiltonianDefiniteness {
            kind,
            certified: true,
            method: DefinitenessMethod::TensorCombination,
            odd_orders,
            per_tensor,
            sampled_range: None,
        }),
        None => {
            let (kind, range) = sample_definiteness(h, restarts, tol)?;
            Ok(HamiltonianDefiniteness {
                kind,
                certified: false,
                method: DefinitenessMethod::SphereSampling,
                odd_orders,
                per_tensor,
                sampled_range: Some(range),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::testutil::*;

    const TOL: f64 = 1e-9;

    fn diag(d: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d))
    }

    #[test]
    fn equilibrium_examples() {
        let sys = fixtures::double_well_system();
        assert!(is_equilibrium(&sys, &[0.0, 2.0], TOL).unwrap());
        assert!(is_equilibrium(&sys, &[0.0, -2.0], TOL).unwrap());
        assert!(is_equilibrium(&sys, &[0.0, 0.0], TOL).unwrap());
        assert!(!is_equilibrium(&sys, &[0.0, 1.0], TOL).unwrap());
        assert!(is_equilibrium(&fixtures::fput_system(3, 0.5, 0.25, 1.0), &[0.0; 6], TOL).unwrap());
    }

    #[test]
    fn newton_examples() {
        let sys = fixtures::double_well_system();
        let x = newton_refine(&sys, &[0.1, 1.8], 50, 1e-12).unwrap();
        assert!((x[0]).abs() < 1e-10 && (x[1] - 2.0).abs() < 1e-10);
        let x = newton_refine(&sys, &[0.0, 2.0], 0, 1e-12).unwrap();
        assert_eq!(x, vec![0.0, 2.0]);
        let x = newton_refine(&sys, &[0.0, 0.01], 50, 1e-12).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-10));
        assert!(matches!(
            newton_refine(&sys, &[0.1, 1.8], 1, 1e-14),
            Err(Error::NoConvergence { .. })
        ));
        // dx = y^2, dy = x^2 has a singular Jacobian at the origin
        let sing = crate::parse::parse_system("dx1 = x2^2 ; dx2 = x1^2").unwrap();
        assert!(matches!(
            newton_refine(&sing, &[0.0, 1.0], 10, 1e-12),
            Err(Error::SingularJacobian)
        ));
    }

    #[test]
    fn matrix_definiteness_examples() {
        assert_eq!(
            matrix_definiteness(&diag(&[-1.0, -8.0]), TOL).unwrap().kind,
            Definiteness::NegativeDefinite
        );
        assert_eq!(
            matrix_definiteness(&diag(&[-1.0, 4.0]), TOL).unwrap().kind,
            Definiteness::Indefinite
        );
        let id = matrix_definiteness(&DMatrix::identity(3, 3), TOL).unwrap();
        assert_eq!(id.kind, Definiteness::PositiveDefinite);
        assert!(!id.heuristic);
        assert_eq!(
            matrix_definiteness(&diag(&[0.0, 4.0]), TOL).unwrap().kind,
            Definiteness::Semidefinite
        );
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(
            matrix_definiteness(&asym, TOL),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn matrix_definiteness_agrees_with_sampling() {
        let mut rng = rng(31);
        for trial in 0..30 {
            let n = rng_range(&mut rng, 1, 8);
            let a = random_tensor(&mut rng, 2, n).to_matrix().unwrap();
            let m = match trial % 3 {
                0 => &a * a.transpose() + DMatrix::identity(n, n) * 0.1,
                1 => -(&a * a.transpose()) - DMatrix::identity(n, n) * 0.1,
                _ => (&a + a.transpose()) * 0.5,
            };
            let v = matrix_definiteness(&m, TOL).unwrap();
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for _ in 0..10_000 {
                let mut u = random_vec(&mut rng, n);
                normalize(&mut u);
                let u = nalgebra::DVector::from_column_slice(&u);
                let q = (u.transpose() * &m * &u)[(0, 0)];
                lo = lo.min(q);
                hi = hi.max(q);
            }
            match v.kind {
                Definiteness::PositiveDefinite => assert!(lo > 0.0),
                Definiteness::NegativeDefinite => assert!(hi < 0.0),
                _ => {}
            }
            assert!(lo >= v.min - 1e-12 && hi <= v.max + 1e-12);
        }
    }

    #[test]
    fn classify_examples() {
        let h = fixtures::double_well_hamiltonian();
        let v = classify_equilibrium(&h, &[0.0, 2.0], TOL).unwrap();
        assert_eq!(v.classification, Classification::Stable);
        assert_eq!(v.rationale, Rationale::HessianDefinite);
        assert!((v.hessian_eigenvalues[0] + 8.0).abs() < 1e-12);
        assert!((v.hessian_eigenvalues[1] + 1.0).abs() < 1e-12);

        let v = classify_equilibrium(&h, &[0.0, -2.0], TOL).unwrap();
        assert_eq!(v.classification, Classification::Stable);

        let v = classify_equilibrium(&h, &[0.0, 0.0], TOL).unwrap();
        assert_eq!(v.classification, Classification::Unstable);
        assert_eq!(v.rationale, Rationale::LinearizationUnstable);
        assert_eq!(v.definiteness, Definiteness::Indefinite);
        let re: Vec<f64> = v.linearization_spectrum.iter().map(|e| e[0]).collect();
        assert!((re[0] + 2.0).abs() < 1e-12 && (re[1] - 2.0).abs() < 1e-12);

        let v = classify_equilibrium(&fixtures::harmonic_hamiltonian(), &[0.0, 0.0], TOL).unwrap();
        assert_eq!(v.classification, Classification::Stable);
        assert_eq!(v.rationale, Rationale::OriginQuadraticForm);

        assert!(matches!(
            classify_equilibrium(&h, &[1.0, 1.0], TOL),
            Err(Error::NotAnEquilibrium { .. })
        ));
    }

    #[test]
    fn indefinite_but_stable_is_inconclusive() {
        // H = (q1^2 + p1^2)/2 - (q2^2 + p2^2)/2: counter-rotating oscillators
        let h = crate::parse::parse_hamiltonian(
            "vars q1, q2, p1, p2\nH = 1/2*q1^2 + 1/2*p1^2 - 1/2*q2^2 - 1/2*p2^2",
        )
        .unwrap();
        let v = classify_equilibrium(&h, &[0.0; 4], TOL).unwrap();
        assert_eq!(v.definiteness, Definiteness::Indefinite);
        assert_eq!(v.classification, Classification::Inconclusive);
    }

    #[test]
    fn linearization_at_origin_is_a2() {
        let mut rng = rng(32);
        for _ in 0..10 {
            let n = 4;
            let h = PolyHamiltonian::from_forms(
                n,
                (2..=4).map(|j| random_tensor(&mut rng, j, n)).collect(),
            )
            .unwrap();
            let sys = h.build_system().unwrap();
            let j = symplectic_j(n).unwrap();
            let lin = j.matrix() * h.hessian(&[0.0; 4]).unwrap();
            let a2 = sys.tensor(2).unwrap().to_matrix().unwrap();
            assert!((&lin - &a2).amax() < 1e-12);
            assert!((&lin - sys.jacobian(&[0.0; 4]).unwrap()).amax() < 1e-12);
        }
    }

    #[test]
    fn tensor_definiteness_examples() {
        let an = fixtures::anharmonic_hamiltonian(1.0, 1.0, 1.0);
        let v = tensor_definiteness(an.tensor(4).unwrap(), DEFAULT_RESTARTS, TOL).unwrap();
        assert_eq!(v.kind, Definiteness::Semidefinite);
        assert!(v.min.abs() < 1e-12);
        assert!(v.min_witness[0].abs() < 1e-6 && (v.min_witness[1].abs() - 1.0).abs() < 1e-6);
        assert!((v.max - 0.25).abs() < 1e-9);
        assert!(v.heuristic);

        let b2 = CubicalTensor::from_matrix(&diag(&[1.0, 2.0])).unwrap();
        let v = tensor_definiteness(&b2, DEFAULT_RESTARTS, TOL).unwrap();
        assert_eq!(v.kind, Definiteness::PositiveDefinite);
        assert!((v.min - 1.0).abs() < 1e-12);

        let double_well = fixtures::double_well_hamiltonian();
        let v = tensor_definiteness(double_well.tensor(4).unwrap(), DEFAULT_RESTARTS, TOL).unwrap();
        assert_eq!(v.kind, Definiteness::Semidefinite);
        assert!(v.max.abs() < 1e-12);
        assert!((v.min + 0.25).abs() < 1e-9);

        let b3 = CubicalTensor::zeros(3, 2).unwrap();
        assert!(matches!(
            tensor_definiteness(&b3, 4, TOL),
            Err(Error::OddOrder(3))
        ));
        let asym = CubicalTensor::from_entries(4, 2, &[(vec![1, 1, 1, 2], 1.0)]).unwrap();
        assert!(matches!(
            tensor_definiteness(&asym, 4, TOL),
            Err(Error::NotSupersymmetric { .. })
        ));
    }

    #[test]
    fn tensor_definiteness_on_known_forms() {
        // x^4 + y^4 + 6x^2y^2 = (x^2+y^2)^2 + 4x^2y^2: PD with min 1 at the axes
        let h = crate::parse::parse_hamiltonian("H = x1^4 + x2^4 + 6*x1^2*x2^2").unwrap();
        let v = tensor_definiteness(h.tensor(4).unwrap(), 16, TOL).unwrap();
        assert_eq!(v.kind, Definiteness::PositiveDefinite);
        assert!((v.min - 1.0).abs() < 1e-9);
        assert!((v.max - 2.0).abs() < 1e-9);
        // x^4 - y^4 is indefinite
        let h = crate::parse::parse_hamiltonian("H = x1^4 - x2^4").unwrap();
        let v = tensor_definiteness(h.tensor(4).unwrap(), 16, TOL).unwrap();
        assert_eq!(v.kind, Definiteness::Indefinite);
        // x^3 y form (order 4): extremes +-(3 sqrt 3)/16 at tan = sqrt 3
        let h = crate::parse::parse_hamiltonian("H = x1^3*x2").unwrap();
        let v = tensor_definiteness(h.tensor(4).unwrap(), 16, TOL).unwrap();
        let ext = 3.0 * 3f64.sqrt() / 16.0;
        assert!((v.max - ext).abs() < 1e-9 && (v.min + ext).abs() < 1e-9);
    }

    #[test]
    fn tensor_definiteness_matches_matrix_path_on_order_two() {
        let mut rng = rng(33);
        for _ in 0..20 {
            let n = rng_range(&mut rng, 1, 6);
            let b = random_tensor(&mut rng, 2, n).symmetrize();
            let t = tensor_definiteness(&b, 8, TOL).unwrap();
            let m = matrix_definiteness(&b.to_matrix().unwrap(), TOL).unwrap();
            assert_eq!(t, m);
        }
    }

    #[test]
    fn sphere_search_brackets_random_samples() {
        let mut rng = rng(34);
        for _ in 0..5 {
            let n = 3;
            let b = random_tensor(&mut rng, 4, n).symmetrize();
            let v = tensor_definiteness(&b, 16, TOL).unwrap();
            for _ in 0..2000 {
                let mut u = random_vec(&mut rng, n);
                normalize(&mut u);
                let f = b.form(&u).unwrap();
                assert!(f >= v.min - 1e-9 && f <= v.max + 1e-9);
            }
        }
    }

    #[test]
    fn hamiltonian_definiteness_examples() {
        let an = fixtures::anharmonic_hamiltonian(1.0, 1.0, 1.0);
        let v = hamiltonian_definiteness(&an, DEFAULT_RESTARTS, TOL).unwrap();
        assert_eq!(v.kind, Definiteness::PositiveDefinite);
        assert!(v.certified);

        let v = hamiltonian_definiteness(&fixtures::cubic_hamiltonian(), DEFAULT_RESTARTS, TOL)
            .unwrap();
        assert!(!v.certified);
        assert_eq!(v.method, DefinitenessMethod::OddOrderPresent);
        assert_eq!(v.odd_orders, vec![3]);
        assert_eq!(v.kind, Definiteness::Indefinite);

        let v = hamiltonian_definiteness(&PolyHamiltonian::zero(2).unwrap(), 4, TOL).unwrap();
        assert_eq!(v.kind, Definiteness::Semidefinite);

        let v = hamiltonian_definiteness(&fixtures::double_well_hamiltonian(), 8, TOL).unwrap();
        assert_eq!(v.method, DefinitenessMethod::SphereSampling);
        assert_eq!(v.kind, Definiteness::Indefinite);

        let neg = crate::parse::parse_hamiltonian("H = -x1^2 - x2^2 - x1^4").unwrap();
        let v = hamiltonian_definiteness(&neg, 8, TOL).unwrap();
        assert_eq!(v.kind, Definiteness::NegativeDefinite);
    }

    #[test]
    fn verdict_serializes() {
        let v =
            classify_equilibrium(&fixtures::double_well_hamiltonian(), &[0.0, 2.0], TOL).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert!(s.contains("\"classification\":\"Stable\""));
        assert!(s.contains("linearization_spectrum"));
    }
}
