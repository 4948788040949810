//! Sparse multivariate polynomials and their conversion to and from the
//! tensor forms.
//!
//! A degree-`d` monomial `c * x^alpha` becomes tensor entries at every
//! distinct rearrangement of the index multiset of `alpha`, each carrying
//! `c / N` where `N` is the number of such rearrangements. The resulting
//! tensor is supersymmetric and has the monomial as its form.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::hamiltonian::{PolyHamiltonian, PolySystem};
use crate::tensor::{
    arrangement_count, for_each_arrangement, for_each_sorted_index, CubicalTensor,
};

/// A single term `coefficient * prod_i x_i^e_i`. Exponent keys are 1-based
/// variable indices; zero exponents are not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Monomial {
    pub coefficient: f64,
    pub exponents: BTreeMap<usize, u32>,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.values().sum()
    }
}

/// Polynomial in `dim` variables keyed by dense exponent vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The coordinate `x_i`, 1-based.
    pub fn var(dim: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= dim, "variable index {i} out of 1..={dim}");
        let mut p = Self::zero(dim);
        let mut e = vec![0; dim];
        e[i - 1] = 1;
        p.terms.insert(e, 1.0);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Add `coefficient * x^exponents`; `exponents` has length `dim`.
    pub fn add_term(&mut self, exponents: Vec<u32>, coefficient: f64) {
        assert_eq!(exponents.len(), self.dim);
        if coefficient == 0.0 {
            return;
        }
        let slot = self.terms.entry(exponents).or_insert(0.0);
        *slot += coefficient;
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(|&c| c == 0.0)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c * factor))
                .collect(),
        }
    }

    /// Nonzero terms as `(exponent vector, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms
            .iter()
            .filter(|(_, &c)| c != 0.0)
            .map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms()
            .map(|(e, c)| Monomial {
                coefficient: c,
                exponents: e
                    .iter()
                    .enumerate()
                    .filter(|(_, &p)| p > 0)
                    .map(|(i, &p)| (i + 1, p))
                    .collect(),
            })
            .collect()
    }

    /// Highest total degree among nonzero terms (0 for the zero polynomial).
    pub fn degree(&self) -> u32 {
        self.terms().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    /// Lowest total degree among nonzero terms.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms().map(|(e, _)| e.iter().sum()).min()
    }

    /// Direct evaluation by monomial products.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(c, |acc, (&p, &xi)| acc * xi.powi(p as i32))
            })
            .sum()
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, rhs.dim);
        let mut out = Polynomial::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

// exponent vector -> sorted 0-based index multiset
fn index_multiset(exponents: &[u32]) -> Vec<usize> {
    exponents
        .iter()
        .enumerate()
        .flat_map(|(i, &p)| std::iter::repeat_n(i, p as usize))
        .collect()
}

fn offset(dim: usize, idx: &[usize]) -> usize {
    idx.iter().fold(0, |off, &i| off * dim + i)
}

// Spread `coef` evenly over the rearrangements of `multiset` inside `block`.
fn scatter(block: &mut [f64], dim: usize, multiset: &mut [usize], coef: f64) {
    let share = coef / arrangement_count(multiset);
    for_each_arrangement(multiset, |a| block[offset(dim, a)] += share);
}

fn gather(block: &[f64], dim: usize, order: usize, mut f: impl FnMut(Vec<u32>, f64)) {
    for_each_sorted_index(order, dim, |sorted| {
        let v = block[offset(dim, sorted)];
        if v != 0.0 {
            let mut e = vec![0u32; dim];
            for &i in sorted {
                e[i] += 1;
            }
            f(e, v * arrangement_count(sorted));
        }
    });
}

/// Tensor form of a polynomial vector field, one polynomial per coordinate.
/// Degree-`d` terms of equation `i` land in slice `i` of `A_{d+1}`.
pub fn system_from_polynomials(rhs: &[Polynomial]) -> Result<PolySystem> {
    let dim = rhs.len();
    let mut blocks: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (eq, p) in rhs.iter().enumerate() {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.dim(),
            });
        }
        for (e, c) in p.terms() {
            let degree = e.iter().sum::<u32>() as usize;
            if degree == 0 {
                return Err(Error::InvalidArgument(format!(
                    "equation {} has a constant term",
                    eq + 1
                )));
            }
            let order = degree + 1;
            let data = match blocks.get_mut(&order) {
                Some(d) => d,
                None => {
                    let zeros = CubicalTensor::zeros(order, dim)?;
                    blocks.entry(order).or_insert(zeros.as_slice().to_vec())
                }
            };
            let block = data.len() / dim;
            scatter(
                &mut data[eq * block..(eq + 1) * block],
                dim,
                &mut index_multiset(e),
                c,
            );
        }
    }
    let tensors = blocks
        .into_iter()
        .map(|(order, data)| CubicalTensor::from_dense(order, dim, data))
        .collect::<Result<_>>()?;
    PolySystem::new(dim, tensors)
}

/// Supersymmetric tensor form of a polynomial with terms of degree >= 2.
pub fn hamiltonian_from_polynomial(h: &Polynomial) -> Result<PolyHamiltonian> {
    let dim = h.dim();
    let mut blocks: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (e, c) in h.terms() {
        let degree = e.iter().sum::<u32>() as usize;
        if degree < 2 {
            return Err(Error::InvalidArgument(format!(
                "Hamiltonian term of degree {degree}"
            )));
        }
        let data = match blocks.get_mut(&degree) {
            Some(d) => d,
            None => {
                let zeros = CubicalTensor::zeros(degree, dim)?;
                blocks.entry(degree).or_insert(zeros.as_slice().to_vec())
            }
        };
        scatter(data, dim, &mut index_multiset(e), c);
    }
    let tensors = blocks
        .into_iter()
        .map(|(order, data)| CubicalTensor::from_dense(order, dim, data))
        .collect::<Result<_>>()?;
    PolyHamiltonian::new(dim, tensors)
}

/// One polynomial per coordinate of the vector field.
pub fn system_to_polynomials(sys: &PolySystem) -> Vec<Polynomial> {
    let n = sys.dim();
    let mut out = vec![Polynomial::zero(n); n];
    for a in sys.tensors() {
        let block = a.as_slice().len() / n;
        for (eq, p) in out.iter_mut().enumerate() {
            gather(
                &a.as_slice()[eq * block..(eq + 1) * block],
                n,
                a.order() - 1,
                |e, c| p.add_term(e, c),
            );
        }
    }
    out
}

pub fn hamiltonian_to_polynomial(h: &PolyHamiltonian) -> Polynomial {
    let n = h.dim();
    let mut p = Polynomial::zero(n);
    for b in h.tensors() {
        gather(b.as_slice(), n, b.order(), |e, c| p.add_term(e, c));
    }
    p
}
