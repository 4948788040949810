//! Dense cubical tensors and the multilinear primitives built on them.
//!
//! A [`CubicalTensor`] of order `k` and dimension `n` holds `n^k` real
//! entries. Indices in the public API are 1-based, `(i1, ..., ik)` with each
//! `ip` in `1..=n`. Storage is row-major with the first index most
//! significant:
//!
//! ```text
//! offset(i1, ..., ik) = sum_p (ip - 1) * n^(k - p)
//! ```
//!
//! so the slice `A[i, ., ..., .]` is the contiguous block
//! `offset(i, 1, ..., 1) .. offset(i, 1, ..., 1) + n^(k-1)`, and contracting
//! the last index against a vector reduces contiguous runs of length `n`.
//!
//! Order-0 tensors exist only as the result of a full contraction and hold a
//! single scalar.

use std::fmt;

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of dense entries a tensor may hold unless a caller asks
/// for a different cap.
pub const DEFAULT_MAX_ENTRIES: usize = 100_000_000;

/// Default relative tolerance for symmetry-type tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Number of entries of a cubical tensor, or `None` on overflow.
pub fn entry_count(order: usize, dim: usize) -> Option<usize> {
    dim.checked_pow(u32::try_from(order).ok()?)
}

/// A permutation of `{1, ..., k}` stored as its image list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Permutation {
    // 0-based images
    images: Vec<usize>,
}

impl Permutation {
    /// Build from 1-based images, `images[i - 1] = sigma(i)`.
    pub fn new(images: &[usize]) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        for &im in images {
            if im == 0 || im > k || seen[im - 1] {
                return Err(Error::InvalidPermutation(images.to_vec()));
            }
            seen[im - 1] = true;
        }
        Ok(Self {
            images: images.iter().map(|i| i - 1).collect(),
        })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            images: (0..k).collect(),
        }
    }

    /// The transposition of positions `i` and `j` (1-based), written
    /// `sigma_ij`.
    pub fn swap(k: usize, i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 || i > k || j > k {
            return Err(Error::InvalidPermutation(vec![i, j]));
        }
        let mut images: Vec<usize> = (0..k).collect();
        images.swap(i - 1, j - 1);
        Ok(Self { images })
    }

    /// Every permutation of `{1, ..., k}` in lexicographic order.
    pub fn all(k: usize) -> impl Iterator<Item = Permutation> {
        (0..k).permutations(k).map(|images| Permutation { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// `sigma(i)` for 1-based `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// 1-based image list.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|i| i + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.images.len()];
        for (i, &im) in self.images.iter().enumerate() {
            inv[im] = i;
        }
        Self { images: inv }
    }

    /// `(self ∘ other)(i) = self(other(i))`.
    ///
    /// With the placement convention of [`CubicalTensor::transpose`],
    /// `A.transpose(s).transpose(t) == A.transpose(&s.compose(&t))`.
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::SizeMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        })
    }

    pub(crate) fn images0(&self) -> &[usize] {
        &self.images
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.images().iter().join(" "))
    }
}

/// Dense order-`k`, dimension-`n` real tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicalTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

impl CubicalTensor {
    /// All-zero tensor, subject to [`DEFAULT_MAX_ENTRIES`].
    pub fn zeros(order: usize, dim: usize) -> Result<Self> {
        Self::zeros_with_cap(order, dim, DEFAULT_MAX_ENTRIES)
    }

    pub fn zeros_with_cap(order: usize, dim: usize, cap: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::OrderTooSmall { min: 1, found: 0 });
        }
        if dim == 0 {
            return Err(Error::InvalidTensor("dim must be >= 1".into()));
        }
        let len = entry_count(order, dim)
            .filter(|&len| len <= cap)
            .ok_or(Error::MemoryCapExceeded { order, dim, cap })?;
        Ok(Self {
            order,
            dim,
            data: vec![0.0; len],
        })
    }

    /// Build a tensor from a sparse list of 1-based `(index, value)` pairs.
    /// Unlisted positions are zero; listing a position twice is an error.
    pub fn from_entries(order: usize, dim: usize, entries: &[(Vec<usize>, f64)]) -> Result<Self> {
        Self::from_entries_with_cap(order, dim, entries, DEFAULT_MAX_ENTRIES)
    }

    pub fn from_entries_with_cap(
        order: usize,
        dim: usize,
        entries: &[(Vec<usize>, f64)],
        cap: usize,
    ) -> Result<Self> {
        let mut t = Self::zeros_with_cap(order, dim, cap)?;
        let mut written = vec![false; t.data.len()];
        for (idx, val) in entries {
            let off = t.checked_offset(idx)?;
            if !val.is_finite() {
                return Err(Error::NonFiniteValue {
                    index: idx.clone(),
                    value: *val,
                });
            }
            if written[off] {
                return Err(Error::DuplicateEntry(idx.clone()));
            }
            written[off] = true;
            t.data[off] = *val;
        }
        Ok(t)
    }

    /// Build from a dense row-major buffer (layout described at module level).
    pub fn from_dense(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = entry_count(order, dim).ok_or(Error::MemoryCapExceeded {
            order,
            dim,
            cap: DEFAULT_MAX_ENTRIES,
        })?;
        if data.len() != expected {
            return Err(Error::InvalidTensor(format!(
                "expected {expected} entries, found {}",
                data.len()
            )));
        }
        let t = Self { order, dim, data };
        if let Some(off) = t.data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                index: t.index_of(off),
                value: t.data[off],
            });
        }
        Ok(t)
    }

    /// Order-2 tensor with the entries of a square matrix.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        let n = m.nrows();
        let data = (0..n * n).map(|o| m[(o / n, o % n)]).collect();
        Self::from_dense(2, n, data)
    }

    /// Order-1 tensor holding a vector.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        Self::from_dense(1, v.len(), v.to_vec())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dense entries in storage order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Value of an order-0 tensor, or the first entry otherwise.
    pub fn scalar(&self) -> f64 {
        self.data[0]
    }

    /// Entry at a 1-based index.
    ///
    /// # Panics
    /// If the index has the wrong length or a component is out of range.
    pub fn get(&self, idx: &[usize]) -> f64 {
        match self.checked_offset(idx) {
            Ok(off) => self.data[off],
            Err(e) => panic!("{e}"),
        }
    }

    /// Set the entry at a 1-based index.
    pub fn set(&mut self, idx: &[usize], val: f64) -> Result<()> {
        let off = self.checked_offset(idx)?;
        if !val.is_finite() {
            return Err(Error::NonFiniteValue {
                index: idx.to_vec(),
                value: val,
            });
        }
        self.data[off] = val;
        Ok(())
    }

    /// Square matrix view of an order-2 tensor.
    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.order != 2 {
            return Err(Error::InvalidTensor(format!(
                "expected order 2, found {}",
                self.order
            )));
        }
        let n = self.dim;
        Ok(DMatrix::from_row_slice(n, n, &self.data))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    /// Nonzero entries as 1-based `(index, value)` pairs in storage order.
    pub fn nonzero_entries(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(off, &v)| (self.index_of(off).into_iter().map(|i| i + 1).collect(), v))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `max |self - other| <= tol * max(1, max|self|, max|other|)`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        match self.max_abs_diff(other) {
            Ok(d) => d <= tol * 1f64.max(self.max_abs()).max(other.max_abs()),
            Err(_) => false,
        }
    }

    /// The order-`(k-1)` slice `A[i, ., ..., .]` for 1-based `i`.
    pub fn slice(&self, i: usize) -> Result<Self> {
        if self.order < 2 {
            return Err(Error::OrderTooSmall {
                min: 2,
                found: self.order,
            });
        }
        if i == 0 || i > self.dim {
            return Err(Error::IndexOutOfRange {
                index: vec![i],
                order: self.order,
                dim: self.dim,
            });
        }
        let block = self.data.len() / self.dim;
        Ok(Self {
            order: self.order - 1,
            dim: self.dim,
            data: self.data[(i - 1) * block..i * block].to_vec(),
        })
    }

    /// Tensor-vector product `A x^m`: contracts the last `m` indices of `A`
    /// against copies of `x`. `m = 0` returns a copy of `A`; `m = k` returns
    /// an order-0 tensor holding `A x^k`.
    pub fn tvp(&self, x: &[f64], m: usize) -> Result<Self> {
        self.check_vector(x)?;
        if m > self.order {
            return Err(Error::InvalidArgument(format!(
                "cannot contract {m} indices of an order-{} tensor",
                self.order
            )));
        }
        let n = self.dim;
        let mut data = self.data.clone();
        for _ in 0..m {
            data = data
                .chunks_exact(n)
                .map(|run| run.iter().zip(x).map(|(a, b)| a * b).sum())
                .collect();
        }
        Ok(Self {
            order: self.order - m,
            dim: n,
            data,
        })
    }

    /// The homogeneous form `A x^k`.
    pub fn form(&self, x: &[f64]) -> Result<f64> {
        Ok(self.tvp(x, self.order)?.scalar())
    }

    /// `A x^(k-1)` as a plain vector.
    pub fn tvp_vector(&self, x: &[f64]) -> Result<Vec<f64>> {
        Ok(self.tvp(x, self.order - 1)?.data)
    }

    /// Matrix-tensor product `(R A)_{i1 i2..ik} = sum_j R_{i1 j} A_{j i2..ik}`.
    pub fn mat_tensor(r: &DMatrix<f64>, a: &Self) -> Result<Self> {
        let n = a.dim;
        if r.nrows() != n || r.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if r.nrows() != n { r.nrows() } else { r.ncols() },
            });
        }
        let block = a.data.len() / n;
        let mut data = vec![0.0; a.data.len()];
        for i in 0..n {
            let out = &mut data[i * block..(i + 1) * block];
            for j in 0..n {
                let rij = r[(i, j)];
                if rij == 0.0 {
                    continue;
                }
                let src = &a.data[j * block..(j + 1) * block];
                for (o, s) in out.iter_mut().zip(src) {
                    *o += rij * s;
                }
            }
        }
        Ok(Self {
            order: a.order,
            dim: n,
            data,
        })
    }

    /// Tensor transpose under `sigma`: the result satisfies
    /// `result(i_{sigma(1)}, ..., i_{sigma(k)}) = A(i_1, ..., i_k)`.
    ///
    /// The identity permutation is accepted and returns a copy.
    pub fn transpose(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.order {
            return Err(Error::SizeMismatch {
                expected: self.order,
                found: sigma.len(),
            });
        }
        if sigma.is_identity() {
            return Ok(self.clone());
        }
        let images = sigma.images0();
        let mut data = vec![0.0; self.data.len()];
        let mut idx = vec![0; self.order];
        let mut dest = vec![0; self.order];
        for (off, &v) in self.data.iter().enumerate() {
            self.fill_index(off, &mut idx);
            for (p, d) in dest.iter_mut().enumerate() {
                *d = idx[images[p]];
            }
            data[self.offset0(&dest)] = v;
        }
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data,
        })
    }

    /// Supersymmetric part `(1/k!) sum_sigma A^{T_sigma}`.
    ///
    /// The sum over all `k!` transposes at a given index equals the mean of
    /// `A` over the distinct rearrangements of that index, which is what is
    /// computed here, once per sorted index tuple.
    pub fn symmetrize(&self) -> Self {
        let mut out = self.clone();
        symmetrize_block(&self.data, &mut out.data, self.order, self.dim);
        out
    }

    /// Symmetrize each slice `A[i, ., ..., .]` over its trailing indices,
    /// leaving the first (output) index alone.
    pub fn symmetrize_trailing(&self) -> Result<Self> {
        if self.order < 2 {
            return Err(Error::OrderTooSmall {
                min: 2,
                found: self.order,
            });
        }
        let mut out = self.clone();
        let block = self.data.len() / self.dim;
        for (src, dst) in self
            .data
            .chunks_exact(block)
            .zip(out.data.chunks_exact_mut(block))
        {
            symmetrize_block(src, dst, self.order - 1, self.dim);
        }
        Ok(out)
    }

    /// Largest `|A(idx) - A(sort(idx))|` and the 1-based index where it
    /// occurs.
    ///
    /// Every rearrangement of an index is reachable by some transpose, so
    /// `A` equals all of its transposes exactly when every entry equals the
    /// entry at its sorted index.
    pub fn supersymmetry_defect(&self) -> (f64, Option<Vec<usize>>) {
        let mut worst = 0.0;
        let mut at = None;
        let mut idx = vec![0; self.order];
        for (off, &v) in self.data.iter().enumerate() {
            self.fill_index(off, &mut idx);
            idx.sort_unstable();
            let d = (v - self.data[self.offset0(&idx)]).abs();
            if d > worst {
                worst = d;
                at = Some(self.index_of(off).into_iter().map(|i| i + 1).collect());
            }
        }
        (worst, at)
    }

    /// Whether `A` is invariant under every transpose, up to
    /// `tol * max(1, max|A|)`.
    pub fn is_supersymmetric(&self, tol: f64) -> bool {
        self.supersymmetry_defect().0 <= tol * 1f64.max(self.max_abs())
    }

    /// Sum of the diagonal entries `A_{ii...i}`.
    pub fn trace(&self) -> f64 {
        if self.order == 0 {
            return self.data[0];
        }
        // step between consecutive diagonal offsets: 1 + n + ... + n^(k-1)
        let stride: usize = (0..self.order).map(|p| self.dim.pow(p as u32)).sum();
        (0..self.dim).map(|i| self.data[i * stride]).sum()
    }

    /// Gradient of `x -> B x^k` for supersymmetric `B`: `k B x^(k-1)`.
    pub fn grad_form(&self, x: &[f64]) -> Result<Vec<f64>> {
        debug_assert!(
            self.is_supersymmetric(DEFAULT_TOL),
            "grad_form requires a supersymmetric tensor"
        );
        let k = self.order as f64;
        Ok(self.tvp_vector(x)?.into_iter().map(|v| k * v).collect())
    }

    /// Gradient of `x -> A x^k` for an arbitrary cubical `A`:
    /// `A x^(k-1) + sum_{j=2..k} A^{T_{sigma_1j}} x^(k-1)`.
    pub fn grad_general(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.tvp_vector(x)?;
        for j in 2..=self.order {
            let t = self.transpose(&Permutation::swap(self.order, 1, j)?)?;
            for (gi, v) in g.iter_mut().zip(t.tvp_vector(x)?) {
                *gi += v;
            }
        }
        Ok(g)
    }

    fn check_vector(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.order != other.order {
            return Err(Error::InvalidTensor(format!(
                "order mismatch: {} vs {}",
                self.order, other.order
            )));
        }
        Ok(())
    }

    fn checked_offset(&self, idx: &[usize]) -> Result<usize> {
        if idx.len() != self.order || idx.iter().any(|&i| i == 0 || i > self.dim) {
            return Err(Error::IndexOutOfRange {
                index: idx.to_vec(),
                order: self.order,
                dim: self.dim,
            });
        }
        Ok(idx.iter().fold(0, |off, &i| off * self.dim + (i - 1)))
    }

    // 0-based index tuple -> offset
    fn offset0(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |off, &i| off * self.dim + i)
    }

    fn fill_index(&self, mut off: usize, idx: &mut [usize]) {
        for slot in idx.iter_mut().rev() {
            *slot = off % self.dim;
            off /= self.dim;
        }
    }

    // offset -> 0-based index tuple
    fn index_of(&self, off: usize) -> Vec<usize> {
        let mut idx = vec![0; self.order];
        self.fill_index(off, &mut idx);
        idx
    }
}

/// Calls `f` once for every distinct rearrangement of `items`, which must be
/// sorted ascending on entry. Leaves `items` sorted on return.
pub(crate) fn for_each_arrangement(items: &mut [usize], mut f: impl FnMut(&[usize])) {
    loop {
        f(items);
        if !next_permutation(items) {
            break;
        }
    }
}

/// Multinomial count of distinct rearrangements of a multiset.
pub(crate) fn arrangement_count(items: &[usize]) -> f64 {
    let mut count = 1.0;
    let mut denom = 1.0;
    let mut run = 0;
    for (p, w) in items.iter().enumerate() {
        count *= (p + 1) as f64;
        run = if p > 0 && items[p - 1] == *w {
            run + 1
        } else {
            1
        };
        denom *= run as f64;
    }
    count / denom
}

// Lexicographic successor; returns false (and resets to sorted) after the last.
fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Calls `f` for every non-decreasing 0-based index tuple of length `order`.
pub(crate) fn for_each_sorted_index(order: usize, dim: usize, mut f: impl FnMut(&[usize])) {
    if order == 0 {
        f(&[]);
        return;
    }
    let mut idx = vec![0usize; order];
    loop {
        f(&idx);
        // advance to the next non-decreasing tuple
        let mut p = order;
        while p > 0 && idx[p - 1] == dim - 1 {
            p -= 1;
        }
        if p == 0 {
            return;
        }
        idx[p - 1] += 1;
        let v = idx[p - 1];
        for slot in &mut idx[p..] {
            *slot = v;
        }
    }
}

fn symmetrize_block(src: &[f64], dst: &mut [f64], order: usize, dim: usize) {
    let offset = |idx: &[usize]| idx.iter().fold(0, |off, &i| off * dim + i);
    for_each_sorted_index(order, dim, |sorted| {
        let mut idx = sorted.to_vec();
        let mut sum = 0.0;
        let mut count = 0usize;
        for_each_arrangement(&mut idx, |a| {
            sum += src[offset(a)];
            count += 1;
        });
        let mean = sum / count as f64;
        for_each_arrangement(&mut idx, |a| dst[offset(a)] = mean);
    });
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    idx: Vec<usize>,
    val: f64,
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    order: usize,
    dim: usize,
    entries: Vec<EntryJson>,
}

impl Serialize for CubicalTensor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TensorJson {
            order: self.order,
            dim: self.dim,
            entries: self
                .nonzero_entries()
                .map(|(idx, val)| EntryJson { idx, val })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CubicalTensor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = TensorJson::deserialize(d)?;
        let entries: Vec<_> = raw.entries.into_iter().map(|e| (e.idx, e.val)).collect();
        CubicalTensor::from_entries(raw.order, raw.dim, &entries).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::*;

    fn a3_cubic() -> CubicalTensor {
        CubicalTensor::from_entries(
            3,
            2,
            &[
                (vec![1, 1, 1], 1.0),
                (vec![2, 1, 2], -1.0),
                (vec![2, 2, 1], -1.0),
            ],
        )
        .unwrap()
    }

    fn j2() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0])
    }

    #[test]
    fn make_tensor_examples() {
        let a2 = CubicalTensor::from_entries(2, 2, &[(vec![1, 2], 2.0)]).unwrap();
        assert_eq!(a2.as_slice(), &[0.0, 2.0, 0.0, 0.0]);
        assert!(CubicalTensor::from_entries(3, 2, &[]).unwrap().is_zero());
        let a3 = a3_cubic();
        assert_eq!(a3.get(&[1, 1, 1]), 1.0);
        assert_eq!(a3.get(&[2, 1, 2]), -1.0);
        assert_eq!(a3.get(&[2, 2, 1]), -1.0);
        assert_eq!(a3.nonzero_entries().count(), 3);
    }

    #[test]
    fn make_tensor_errors() {
        assert!(matches!(
            CubicalTensor::from_entries(2, 2, &[(vec![1, 3], 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            CubicalTensor::from_entries(2, 2, &[(vec![0, 1], 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            CubicalTensor::from_entries(2, 2, &[(vec![1], 1.0)]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            CubicalTensor::from_entries(2, 2, &[(vec![1, 2], 1.0), (vec![1, 2], 2.0)]),
            Err(Error::DuplicateEntry(_))
        ));
        assert!(matches!(
            CubicalTensor::from_entries(2, 2, &[(vec![1, 2], f64::NAN)]),
            Err(Error::NonFiniteValue { .. })
        ));
        assert!(matches!(
            CubicalTensor::from_entries(2, 2, &[(vec![1, 2], f64::INFINITY)]),
            Err(Error::NonFiniteValue { .. })
        ));
        assert!(matches!(
            CubicalTensor::zeros(9, 10),
            Err(Error::MemoryCapExceeded { .. })
        ));
        assert!(matches!(
            CubicalTensor::zeros(64, 10),
            Err(Error::MemoryCapExceeded { .. })
        ));
        assert!(CubicalTensor::zeros_with_cap(3, 3, 26).is_err());
        assert!(CubicalTensor::zeros_with_cap(3, 3, 27).is_ok());
    }

    #[test]
    fn offsets_are_row_major_and_bijective() {
        let t = CubicalTensor::zeros(3, 3).unwrap();
        assert_eq!(t.checked_offset(&[1, 1, 1]).unwrap(), 0);
        assert_eq!(t.checked_offset(&[1, 1, 2]).unwrap(), 1);
        assert_eq!(t.checked_offset(&[2, 1, 1]).unwrap(), 9);
        for off in 0..27 {
            let idx: Vec<usize> = t.index_of(off).iter().map(|i| i + 1).collect();
            assert_eq!(t.checked_offset(&idx).unwrap(), off);
        }
    }

    #[test]
    fn tvp_examples() {
        let v = a3_cubic().tvp(&[1.0, 1.0], 2).unwrap();
        assert_eq!(v.order(), 1);
        assert_eq!(v.as_slice(), &[1.0, -2.0]);

        let mut rng = rng(1);
        let a = random_tensor(&mut rng, 4, 3);
        let z = a.tvp(&[0.0; 3], 2).unwrap();
        assert!(z.is_zero());

        let b2 = CubicalTensor::from_entries(2, 2, &[(vec![2, 2], 1.0)]).unwrap();
        assert_eq!(b2.form(&[3.0, 5.0]).unwrap(), 25.0);
        assert_eq!(b2.tvp(&[3.0, 5.0], 2).unwrap().order(), 0);
    }

    #[test]
    fn tvp_errors() {
        let a = a3_cubic();
        assert!(matches!(
            a.tvp(&[1.0], 1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(a.tvp(&[1.0, 1.0], 4).is_err());
        assert_eq!(a.tvp(&[1.0, 1.0], 0).unwrap(), a);
    }

    #[test]
    fn tvp_matches_brute_force_sum() {
        let mut rng = rng(2);
        for _ in 0..20 {
            let (k, n) = (rng_range(&mut rng, 1, 5), rng_range(&mut rng, 1, 4));
            let a = random_tensor(&mut rng, k, n);
            let x = random_vec(&mut rng, n);
            let brute: f64 = (0..a.as_slice().len())
                .map(|off| {
                    a.index_of(off)
                        .iter()
                        .fold(a.as_slice()[off], |p, &i| p * x[i])
                })
                .sum();
            assert!((a.form(&x).unwrap() - brute).abs() <= 1e-12 * (1.0 + brute.abs()));
        }
    }

    #[test]
    fn mat_tensor_examples() {
        let out = CubicalTensor::mat_tensor(&j2(), &a3_cubic()).unwrap();
        let expected = CubicalTensor::from_entries(
            3,
            2,
            &[
                (vec![1, 1, 2], -1.0),
                (vec![1, 2, 1], -1.0),
                (vec![2, 1, 1], -1.0),
            ],
        )
        .unwrap();
        assert_eq!(out, expected);

        let mut rng = rng(3);
        for _ in 0..20 {
            let (k, n) = (rng_range(&mut rng, 1, 4), rng_range(&mut rng, 1, 4));
            let a = random_tensor(&mut rng, k, n);
            assert_eq!(
                CubicalTensor::mat_tensor(&DMatrix::identity(n, n), &a).unwrap(),
                a
            );
        }
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let b = DMatrix::from_row_slice(2, 2, &[0.5, -1.0, 2.0, 0.0]);
        let prod = CubicalTensor::mat_tensor(&m, &CubicalTensor::from_matrix(&b).unwrap()).unwrap();
        assert_eq!(prod.to_matrix().unwrap(), &m * &b);
        assert!(CubicalTensor::mat_tensor(&DMatrix::identity(3, 3), &a3_cubic()).is_err());
    }

    #[test]
    fn transpose_examples() {
        let m = CubicalTensor::from_dense(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let swap = Permutation::swap(2, 1, 2).unwrap();
        assert_eq!(
            m.transpose(&swap).unwrap().as_slice(),
            &[1.0, 3.0, 2.0, 4.0]
        );

        let a3 = a3_cubic();
        assert_eq!(
            a3.transpose(&Permutation::swap(3, 2, 3).unwrap()).unwrap(),
            a3
        );
        assert_eq!(a3.transpose(&Permutation::identity(3)).unwrap(), a3);
        assert!(matches!(
            a3.transpose(&Permutation::identity(2)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn transpose_placement_convention() {
        // result(i_{s(1)}, i_{s(2)}, i_{s(3)}) = A(i1, i2, i3) with s = (2 3 1)
        let a = CubicalTensor::from_entries(3, 3, &[(vec![1, 2, 3], 7.0)]).unwrap();
        let s = Permutation::new(&[2, 3, 1]).unwrap();
        let t = a.transpose(&s).unwrap();
        assert_eq!(t.get(&[2, 3, 1]), 7.0);
        assert_eq!(t.nonzero_entries().count(), 1);
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(&[1, 1]).is_err());
        assert!(Permutation::new(&[0, 1]).is_err());
        assert!(Permutation::new(&[1, 3]).is_err());
        let s = Permutation::new(&[3, 1, 2]).unwrap();
        assert!(s.compose(&s.inverse()).unwrap().is_identity());
        assert_eq!(s.apply(1), 3);
        assert_eq!(Permutation::all(4).count(), 24);
        assert_eq!(s.to_string(), "(3 1 2)");
    }

    #[test]
    fn symmetrize_examples() {
        let single = CubicalTensor::from_entries(3, 2, &[(vec![1, 2, 2], -3.0)]).unwrap();
        let s = single.symmetrize();
        for idx in [[1, 2, 2], [2, 1, 2], [2, 2, 1]] {
            assert!((s.get(&idx) + 1.0).abs() < 1e-15);
        }
        assert_eq!(s.nonzero_entries().count(), 3);
        assert_eq!(s.symmetrize(), s);
    }

    #[test]
    fn symmetrize_matches_average_over_all_transposes() {
        let mut rng = rng(4);
        for _ in 0..10 {
            let (k, n) = (rng_range(&mut rng, 1, 5), rng_range(&mut rng, 1, 4));
            let a = random_tensor(&mut rng, k, n);
            let oracle = brute_force_symmetrize(&a);
            assert!(a.symmetrize().max_abs_diff(&oracle).unwrap() < 1e-12);
        }
    }

    #[test]
    fn symmetrize_trailing_examples() {
        let a = CubicalTensor::from_entries(3, 2, &[(vec![2, 1, 2], -2.0)]).unwrap();
        let c = a.symmetrize_trailing().unwrap();
        assert_eq!(c.get(&[2, 1, 2]), -1.0);
        assert_eq!(c.get(&[2, 2, 1]), -1.0);
        assert_eq!(c.nonzero_entries().count(), 2);
        assert_eq!(a3_cubic().symmetrize_trailing().unwrap(), a3_cubic());
        let m = CubicalTensor::from_dense(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(m.symmetrize_trailing().unwrap(), m);
        let v = CubicalTensor::from_vector(&[1.0, 2.0]).unwrap();
        assert!(matches!(
            v.symmetrize_trailing(),
            Err(Error::OrderTooSmall { .. })
        ));
    }

    #[test]
    fn supersymmetry_examples() {
        let ja3 = CubicalTensor::mat_tensor(&j2(), &a3_cubic()).unwrap();
        assert!(ja3.is_supersymmetric(1e-12));
        assert!(!a3_cubic().is_supersymmetric(1e-9));
        let (_, at) = a3_cubic().supersymmetry_defect();
        assert!(at.is_some());
        let mut rng = rng(5);
        assert!(random_tensor(&mut rng, 1, 5).is_supersymmetric(0.0));
    }

    #[test]
    fn supersymmetry_check_matches_all_transposes() {
        let mut rng = rng(6);
        for trial in 0..40 {
            let (k, n) = (rng_range(&mut rng, 1, 4), rng_range(&mut rng, 1, 3));
            let mut a = random_tensor(&mut rng, k, n).symmetrize();
            if trial % 2 == 0 {
                let off = rng_range(&mut rng, 0, a.data.len() - 1);
                a.data[off] += 0.5;
            }
            let brute = Permutation::all(k)
                .all(|s| a.transpose(&s).unwrap().max_abs_diff(&a).unwrap() <= 1e-12);
            assert_eq!(a.is_supersymmetric(1e-12), brute);
        }
    }

    #[test]
    fn trace_examples() {
        let a2 = CubicalTensor::from_entries(2, 2, &[(vec![1, 2], 2.0)]).unwrap();
        assert_eq!(a2.trace(), 0.0);
        assert_eq!(a3_cubic().trace(), 1.0);
        let d = CubicalTensor::from_entries(3, 3, &[(vec![2, 2, 2], 4.0), (vec![3, 3, 3], 1.0)])
            .unwrap();
        assert_eq!(d.trace(), 5.0);

        let mut rng = rng(7);
        for n in [2, 4, 6] {
            let m = n / 2;
            let mut jn = DMatrix::zeros(n, n);
            for i in 0..m {
                jn[(i, i + m)] = 1.0;
                jn[(i + m, i)] = -1.0;
            }
            let r = random_tensor(&mut rng, 2, n).symmetrize();
            let jr = CubicalTensor::mat_tensor(&jn, &r).unwrap();
            assert!(jr.trace().abs() < 1e-12);
        }
    }

    #[test]
    fn grad_form_examples() {
        let b2 = CubicalTensor::from_entries(2, 2, &[(vec![2, 2], 1.0)]).unwrap();
        assert_eq!(b2.grad_form(&[3.0, 5.0]).unwrap(), vec![0.0, 10.0]);
        let b = 1.7;
        let b4 = CubicalTensor::from_entries(4, 2, &[(vec![1, 1, 1, 1], b / 4.0)]).unwrap();
        let (x, p) = (0.8, -0.3);
        let g = b4.grad_form(&[x, p]).unwrap();
        assert!((g[0] - b * x * x * x).abs() < 1e-15);
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn grad_general_order2_is_a_plus_a_transpose() {
        let mut rng = rng(8);
        let a = random_tensor(&mut rng, 2, 3);
        let x = random_vec(&mut rng, 3);
        let m = a.to_matrix().unwrap();
        let xv = nalgebra::DVector::from_column_slice(&x);
        let expected = &m * &xv + m.transpose() * &xv;
        let g = a.grad_general(&x).unwrap();
        for i in 0..3 {
            assert!((g[i] - expected[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn grad_general_equals_grad_form_on_supersymmetric() {
        let mut rng = rng(9);
        for _ in 0..20 {
            let (k, n) = (rng_range(&mut rng, 1, 5), rng_range(&mut rng, 1, 4));
            let b = random_tensor(&mut rng, k, n).symmetrize();
            let x = random_vec(&mut rng, n);
            let g1 = b.grad_form(&x).unwrap();
            let g2 = b.grad_general(&x).unwrap();
            for (a, c) in g1.iter().zip(&g2) {
                assert!((a - c).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = rng(10);
        for trial in 0..40 {
            let (k, n) = (rng_range(&mut rng, 1, 5), rng_range(&mut rng, 1, 6));
            let a = random_tensor(&mut rng, k, n);
            let a = if trial % 2 == 0 { a.symmetrize() } else { a };
            let x = random_vec(&mut rng, n);
            let fd = central_gradient(|y| a.form(y).unwrap(), &x, 1e-5);
            let g = if trial % 2 == 0 {
                a.grad_form(&x).unwrap()
            } else {
                a.grad_general(&x).unwrap()
            };
            assert!(rel_err(&g, &fd) <= 1e-6, "k={k} n={n}");
        }
    }

    #[test]
    fn json_roundtrip_and_duplicates() {
        let a = a3_cubic();
        let s = serde_json::to_string(&a).unwrap();
        let back: CubicalTensor = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        let dup = r#"{"order":2,"dim":2,"entries":[{"idx":[1,1],"val":1},{"idx":[1,1],"val":2}]}"#;
        assert!(serde_json::from_str::<CubicalTensor>(dup).is_err());
        let bad = r#"{"order":2,"dim":2,"entries":[{"idx":[1,3],"val":1}]}"#;
        assert!(serde_json::from_str::<CubicalTensor>(bad).is_err());
    }

    #[test]
    fn arrangement_helpers() {
        let mut v = vec![0, 0, 1];
        let mut seen = vec![];
        for_each_arrangement(&mut v, |a| seen.push(a.to_vec()));
        assert_eq!(seen, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(v, vec![0, 0, 1]);
        assert_eq!(arrangement_count(&[0, 0, 1]), 3.0);
        assert_eq!(arrangement_count(&[0, 1, 2, 3]), 24.0);
        assert_eq!(arrangement_count(&[2, 2, 2, 2]), 1.0);
        let mut count = 0;
        for_each_sorted_index(3, 4, |_| count += 1);
        assert_eq!(count, 20);
    }
}
