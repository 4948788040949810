//! Hamiltonian cubical tensors and the two forms of a polynomial system.
//!
//! A [`PolySystem`] is the vector field `dx/dt = A_k x^(k-1) + ... + A_2 x`.
//! A [`PolyHamiltonian`] is `H(x) = B_k x^k + ... + B_2 x^2` with
//! supersymmetric `B_j`. The two are linked by `dx/dt = J grad H(x)`, which
//! gives `A_j = j J B_j`.
//!
//! State ordering: coordinates first, momenta second, so that
//! `J = [[0, I], [-I, 0]]` and `dq/dt = dH/dp`, `dp/dt = -dH/dq`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{CubicalTensor, Permutation};

/// Highest tensor order for which the all-permutations definition test runs.
pub const DEFAULT_DEF_ORDER_CAP: usize = 8;

/// Tolerance used to certify the coefficient tensors of a Hamiltonian as
/// supersymmetric at construction.
pub const HAMILTONIAN_SYMMETRY_TOL: f64 = 1e-12;

/// The canonical symplectic matrix `J = [[0, I_m], [-I_m, 0]]` of size `2m`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticMatrix {
    matrix: DMatrix<f64>,
}

impl SymplecticMatrix {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::OddDimension(n));
        }
        let m = n / 2;
        let mut matrix = DMatrix::zeros(n, n);
        for i in 0..m {
            matrix[(i, i + m)] = 1.0;
            matrix[(i + m, i)] = -1.0;
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `J^T = -J = J^{-1}`.
    pub fn transpose(&self) -> DMatrix<f64> {
        self.matrix.transpose()
    }

    /// `J v`, computed by block swap.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let m = v.len() / 2;
        let mut out = vec![0.0; v.len()];
        out[..m].copy_from_slice(&v[m..]);
        for i in 0..m {
            out[m + i] = -v[i];
        }
        out
    }
}

/// `J` for state dimension `n`.
pub fn symplectic_j(n: usize) -> Result<SymplecticMatrix> {
    SymplecticMatrix::new(n)
}

/// Largest supersymmetry violation of `J A`, with the 1-based index of `J A`
/// where it occurs.
pub fn hamiltonian_defect(a: &CubicalTensor) -> Result<(f64, Option<Vec<usize>>, f64)> {
    let j = symplectic_j(a.dim())?;
    let ja = CubicalTensor::mat_tensor(j.matrix(), a)?;
    let (defect, at) = ja.supersymmetry_defect();
    Ok((defect, at, ja.max_abs()))
}

/// `A` is a Hamiltonian cubical tensor iff `J A` is supersymmetric.
/// For matrices this is `A^T J + J A = 0`.
pub fn is_hamiltonian_tensor(a: &CubicalTensor, tol: f64) -> Result<bool> {
    let (defect, _, scale) = hamiltonian_defect(a)?;
    Ok(defect <= tol * scale.max(1.0))
}

/// Literal definition test: `(J^T A)^{T_sigma} + J A = 0` for every `sigma`.
/// Costs `k!` transposes; refuses orders above [`DEFAULT_DEF_ORDER_CAP`].
pub fn is_hamiltonian_tensor_def(a: &CubicalTensor, tol: f64) -> Result<bool> {
    is_hamiltonian_tensor_def_with_cap(a, tol, DEFAULT_DEF_ORDER_CAP)
}

pub fn is_hamiltonian_tensor_def_with_cap(
    a: &CubicalTensor,
    tol: f64,
    order_cap: usize,
) -> Result<bool> {
    let j = symplectic_j(a.dim())?;
    if a.order() > order_cap {
        return Err(Error::OrderCapExceeded {
            order: a.order(),
            cap: order_cap,
        });
    }
    let jt_a = CubicalTensor::mat_tensor(&j.transpose(), a)?;
    let ja = CubicalTensor::mat_tensor(j.matrix(), a)?;
    let scale = ja.max_abs().max(1.0);
    for sigma in Permutation::all(a.order()) {
        let lhs = jt_a.transpose(&sigma)?.add(&ja)?;
        if lhs.max_abs() > tol * scale {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Split a Hamiltonian tensor as `A = J R` with `R = J^T A` supersymmetric.
pub fn decompose(a: &CubicalTensor, tol: f64) -> Result<CubicalTensor> {
    let j = symplectic_j(a.dim())?;
    let r = CubicalTensor::mat_tensor(&j.transpose(), a)?;
    if !r.is_supersymmetric(tol) {
        return Err(Error::NotHamiltonian { order: a.order() });
    }
    let back = CubicalTensor::mat_tensor(j.matrix(), &r)?;
    if !back.approx_eq(a, 1e-12) {
        return Err(Error::NotHamiltonian { order: a.order() });
    }
    Ok(r)
}

/// Evidence that a system tensor fails the Hamiltonian test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    /// Order `j` of the smallest failing `A_j`.
    pub order: usize,
    /// 1-based index of `J A_j` with the largest deviation from its sorted
    /// rearrangement.
    pub index: Vec<usize>,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HamiltonianCheck {
    pub is_hamiltonian: bool,
    pub witness: Option<Witness>,
}

fn check_orders(dim: usize, tensors: &BTreeMap<usize, CubicalTensor>) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dim must be >= 1".into()));
    }
    for (&j, t) in tensors {
        if j < 2 {
            return Err(Error::InvalidTensor(format!(
                "system tensors start at order 2, found order {j}"
            )));
        }
        if t.order() != j {
            return Err(Error::InvalidTensor(format!(
                "tensor stored under order {j} has order {}",
                t.order()
            )));
        }
        if t.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: t.dim(),
            });
        }
    }
    Ok(())
}

fn collect_tensors(tensors: Vec<CubicalTensor>) -> Result<BTreeMap<usize, CubicalTensor>> {
    let mut map = BTreeMap::new();
    for t in tensors {
        let order = t.order();
        if map.insert(order, t).is_some() {
            return Err(Error::InvalidTensor(format!("order {order} given twice")));
        }
    }
    Ok(map)
}

/// Polynomial vector field `dx/dt = sum_j A_j x^(j-1)`, stored in canonical
/// form: each slice `A_j[i, ., ..., .]` is supersymmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySystem {
    dim: usize,
    tensors: BTreeMap<usize, CubicalTensor>,
}

impl PolySystem {
    /// Build a system from its tensors (any order >= 2, at most one per
    /// order). Tensors are canonicalized by trailing symmetrization, which
    /// leaves the vector field unchanged.
    pub fn new(dim: usize, tensors: Vec<CubicalTensor>) -> Result<Self> {
        let tensors = collect_tensors(tensors)?;
        check_orders(dim, &tensors)?;
        let tensors = tensors
            .into_iter()
            .map(|(j, t)| Ok((j, t.symmetrize_trailing()?)))
            .collect::<Result<_>>()?;
        Ok(Self { dim, tensors })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, vec![])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest stored order, at least 2.
    pub fn degree(&self) -> usize {
        self.tensors.keys().next_back().copied().unwrap_or(2).max(2)
    }

    /// `A_j`, if stored.
    pub fn tensor(&self, order: usize) -> Option<&CubicalTensor> {
        self.tensors.get(&order)
    }

    pub fn tensors(&self) -> impl Iterator<Item = &CubicalTensor> {
        self.tensors.values()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `sum_j A_j x^(j-1)`.
    pub fn eval_rhs(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut out = vec![0.0; self.dim];
        for a in self.tensors.values() {
            for (o, v) in out.iter_mut().zip(a.tvp_vector(x)?) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// Jacobian of the vector field, `sum_j (j-1) A_j x^(j-2)`. Relies on the
    /// canonical form.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let n = self.dim;
        let mut jac = DMatrix::zeros(n, n);
        for (&j, a) in &self.tensors {
            let m = a.tvp(x, j - 2)?;
            let s = m.as_slice();
            let f = (j - 1) as f64;
            for r in 0..n {
                for c in 0..n {
                    jac[(r, c)] += f * s[r * n + c];
                }
            }
        }
        Ok(jac)
    }

    /// Jacobian assembled row by row from the general gradient formula
    /// applied to each slice `A_j[i, ., ..., .]`. Valid for any
    /// representation, canonical or not.
    pub fn jacobian_general(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let n = self.dim;
        let mut jac = DMatrix::zeros(n, n);
        for a in self.tensors.values() {
            for i in 0..n {
                let row = a.slice(i + 1)?.grad_general(x)?;
                for (c, v) in row.into_iter().enumerate() {
                    jac[(i, c)] += v;
                }
            }
        }
        Ok(jac)
    }

    /// Every `A_j` is a Hamiltonian cubical tensor. On failure the witness
    /// names the smallest failing order.
    pub fn is_hamiltonian(&self, tol: f64) -> Result<HamiltonianCheck> {
        if !self.dim.is_multiple_of(2) {
            return Err(Error::OddDimension(self.dim));
        }
        for (&j, a) in &self.tensors {
            let (defect, at, scale) = hamiltonian_defect(a)?;
            if defect > tol * scale.max(1.0) {
                return Ok(HamiltonianCheck {
                    is_hamiltonian: false,
                    witness: Some(Witness {
                        order: j,
                        index: at.unwrap_or_default(),
                        violation: defect,
                    }),
                });
            }
        }
        Ok(HamiltonianCheck {
            is_hamiltonian: true,
            witness: None,
        })
    }

    /// The Hamiltonian with `B_j = (1/j) J^T A_j`.
    pub fn extract_hamiltonian(&self, tol: f64) -> Result<PolyHamiltonian> {
        let check = self.is_hamiltonian(tol)?;
        if let Some(w) = check.witness {
            return Err(Error::NotHamiltonian { order: w.order });
        }
        let jt = symplectic_j(self.dim)?.transpose();
        let tensors = self
            .tensors
            .iter()
            .map(|(&j, a)| {
                // project away the sub-tolerance asymmetry
                let r = CubicalTensor::mat_tensor(&jt, a)?.symmetrize();
                Ok(r.scaled(1.0 / j as f64))
            })
            .collect::<Result<Vec<_>>>()?;
        PolyHamiltonian::new(self.dim, tensors)
    }
}

/// `H(x) = sum_j B_j x^j` with supersymmetric `B_j`, `j >= 2`, on an
/// even-dimensional phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyHamiltonian {
    dim: usize,
    tensors: BTreeMap<usize, CubicalTensor>,
}

impl PolyHamiltonian {
    /// Build from supersymmetric tensors; rejects tensors that are not
    /// supersymmetric to [`HAMILTONIAN_SYMMETRY_TOL`].
    pub fn new(dim: usize, tensors: Vec<CubicalTensor>) -> Result<Self> {
        if !dim.is_multiple_of(2) {
            return Err(Error::OddDimension(dim));
        }
        let tensors = collect_tensors(tensors)?;
        check_orders(dim, &tensors)?;
        for t in tensors.values() {
            let (deviation, _) = t.supersymmetry_defect();
            if deviation > HAMILTONIAN_SYMMETRY_TOL * t.max_abs().max(1.0) {
                return Err(Error::NotSupersymmetric { deviation });
            }
        }
        Ok(Self { dim, tensors })
    }

    /// Build from arbitrary coefficient tensors, replacing each by its
    /// supersymmetric part (which has the same form).
    pub fn from_forms(dim: usize, tensors: Vec<CubicalTensor>) -> Result<Self> {
        Self::new(dim, tensors.iter().map(CubicalTensor::symmetrize).collect())
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(dim, vec![])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.tensors.keys().next_back().copied().unwrap_or(2).max(2)
    }

    pub fn tensor(&self, order: usize) -> Option<&CubicalTensor> {
        self.tensors.get(&order)
    }

    pub fn tensors(&self) -> impl Iterator<Item = &CubicalTensor> {
        self.tensors.values()
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `H(x) = sum_j B_j x^j`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        self.tensors.values().map(|b| b.form(x)).sum()
    }

    /// `sum_j j B_j x^(j-1)`.
    pub fn grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        let mut out = vec![0.0; self.dim];
        for b in self.tensors.values() {
            for (o, v) in out.iter_mut().zip(b.grad_form(x)?) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// `sum_j j (j-1) B_j x^(j-2)`.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(x)?;
        let n = self.dim;
        let mut acc = vec![0.0; n * n];
        for (&j, b) in &self.tensors {
            let f = (j * (j - 1)) as f64;
            let m = b.tvp(x, j - 2)?;
            for (a, v) in acc.iter_mut().zip(m.as_slice()) {
                *a += f * v;
            }
        }
        Ok(DMatrix::from_row_slice(n, n, &acc))
    }

    /// The vector field `dx/dt = J grad H`, i.e. `A_j = j J B_j`.
    pub fn build_system(&self) -> Result<PolySystem> {
        let j = symplectic_j(self.dim)?;
        let tensors = self
            .tensors
            .iter()
            .map(|(&order, b)| Ok(CubicalTensor::mat_tensor(j.matrix(), b)?.scaled(order as f64)))
            .collect::<Result<Vec<_>>>()?;
        PolySystem::new(self.dim, tensors)
    }
}

#[derive(Serialize, Deserialize)]
struct PolyJson {
    dim: usize,
    degree: usize,
    tensors: BTreeMap<String, CubicalTensor>,
}

fn to_json(dim: usize, degree: usize, tensors: &BTreeMap<usize, CubicalTensor>) -> PolyJson {
    PolyJson {
        dim,
        degree,
        tensors: tensors
            .iter()
            .map(|(j, t)| (j.to_string(), t.clone()))
            .collect(),
    }
}

fn from_json(raw: PolyJson) -> Result<(usize, Vec<CubicalTensor>)> {
    let mut out = Vec::new();
    for (key, t) in raw.tensors {
        let j: usize = key
            .parse()
            .map_err(|_| Error::InvalidTensor(format!("bad order key `{key}`")))?;
        if j != t.order() {
            return Err(Error::InvalidTensor(format!(
                "key {j} holds a tensor of order {}",
                t.order()
            )));
        }
        if j > raw.degree {
            return Err(Error::InvalidTensor(format!(
                "order {j} exceeds declared degree {}",
                raw.degree
            )));
        }
        out.push(t);
    }
    Ok((raw.dim, out))
}

impl Serialize for PolySystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_json(self.dim, self.degree(), &self.tensors).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolySystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (dim, tensors) =
            from_json(PolyJson::deserialize(d)?).map_err(serde::de::Error::custom)?;
        PolySystem::new(dim, tensors).map_err(serde::de::Error::custom)
    }
}

impl Serialize for PolyHamiltonian {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_json(self.dim, self.degree(), &self.tensors).serialize(s)
    }
}

impl<'de> Deserialize<'de> for PolyHamiltonian {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let (dim, tensors) =
            from_json(PolyJson::deserialize(d)?).map_err(serde::de::Error::custom)?;
        PolyHamiltonian::new(dim, tensors).map_err(serde::de::Error::custom)
    }
}
