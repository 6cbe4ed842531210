//! Dense multi-index tensors with jet or rational entries.
//!
//! Slots are positional. Every slot has the same dimension (the manifold
//! dimension) and a variance. Declared symmetries are checked when they are
//! attached, never assumed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Debug;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SymmetryKind {
    Symmetric,
    Antisymmetric,
}

/// A declared (and verified) symmetry over a set of slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symmetry {
    pub slots: Vec<usize>,
    pub kind: SymmetryKind,
}

/// Symmetrization modes of [`sym_project`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymMode {
    /// Average over all permutations of the slots.
    Symmetrize,
    /// Signed average over all permutations of the slots.
    Antisymmetrize,
    /// Unnormalized sum over the cyclic rotations of the slots.
    CyclicSum,
}

/// Entry type of a [`Tensor`]: a commutative ring with rational scaling.
pub trait Scalar: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn is_zero_value(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
}

impl Scalar for Jet {
    fn zero_like(&self) -> Self {
        Jet::zero(self.n_vars(), self.order())
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, c: &Rational) -> Self {
        Jet::scale(self, c)
    }
}

/// Dense tensor over `dim`-dimensional slots, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<S> {
    dim: usize,
    variances: Vec<Variance>,
    data: Vec<S>,
    symmetries: Vec<Symmetry>,
}

pub type JetTensor = Tensor<Jet>;
pub type PointTensor = Tensor<Rational>;

/// Row-major odometer over all multi-indices of the given rank.
pub fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

fn permutations(n: usize) -> Vec<(Vec<usize>, bool)> {
    // Heap's algorithm; bool = odd permutation.
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut odd = false;
    out.push((p.clone(), odd));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            odd = !odd;
            out.push((p.clone(), odd));
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

impl<S: Scalar> Tensor<S> {
    pub fn from_fn<F>(dim: usize, variances: Vec<Variance>, mut f: F) -> Self
    where
        F: FnMut(&[usize]) -> S,
    {
        let data = multi_indices(dim, variances.len())
            .map(|idx| f(&idx))
            .collect();
        Self {
            dim,
            variances,
            data,
            symmetries: Vec::new(),
        }
    }

    pub fn try_from_fn<F>(dim: usize, variances: Vec<Variance>, mut f: F) -> Result<Self>
    where
        F: FnMut(&[usize]) -> Result<S>,
    {
        let data = multi_indices(dim, variances.len())
            .map(|idx| f(&idx))
            .collect::<Result<_>>()?;
        Ok(Self {
            dim,
            variances,
            data,
            symmetries: Vec::new(),
        })
    }

    pub fn from_vec(dim: usize, variances: Vec<Variance>, data: Vec<S>) -> Result<Self> {
        let expected = dim.pow(variances.len() as u32);
        if data.len() != expected {
            return Err(Error::Shape(format!(
                "{} entries supplied, {} expected",
                data.len(),
                expected
            )));
        }
        Ok(Self {
            dim,
            variances,
            data,
            symmetries: Vec::new(),
        })
    }

    /// All-lower tensor of the given rank.
    pub fn covariant_from_fn<F>(dim: usize, rank: usize, f: F) -> Self
    where
        F: FnMut(&[usize]) -> S,
    {
        Self::from_fn(dim, vec![Variance::Down; rank], f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.variances.len()
    }

    pub fn variances(&self) -> &[Variance] {
        &self.variances
    }

    pub fn symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.data[self.flat_index(idx)]
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vec<usize>, &S)> {
        multi_indices(self.dim, self.rank()).zip(self.data.iter())
    }

    /// First multi-index where the symmetry fails, if any.
    pub fn symmetry_witness(&self, slots: &[usize], kind: SymmetryKind) -> Option<Vec<usize>> {
        for (idx, v) in self.entries() {
            for w in slots.windows(2) {
                let mut swapped = idx.clone();
                swapped.swap(w[0], w[1]);
                let other = self.get(&swapped);
                let ok = match kind {
                    SymmetryKind::Symmetric => v == other,
                    SymmetryKind::Antisymmetric => v.add(other).is_zero_value(),
                };
                if !ok {
                    return Some(idx);
                }
            }
        }
        None
    }

    /// Attaches a symmetry after verifying it entrywise.
    pub fn with_symmetry(mut self, slots: &[usize], kind: SymmetryKind) -> Result<Self> {
        if let Some(&bad) = slots.iter().find(|&&s| s >= self.rank()) {
            return Err(Error::Index {
                index: bad,
                bound: self.rank(),
            });
        }
        if slots
            .windows(2)
            .any(|w| self.variances[w[0]] != self.variances[w[1]])
        {
            return Err(Error::Shape(
                "symmetry across slots of different variance".into(),
            ));
        }
        if let Some(w) = self.symmetry_witness(slots, kind) {
            return Err(Error::Precondition(format!(
                "declared {kind:?} symmetry over slots {slots:?} fails at {w:?}"
            )));
        }
        self.symmetries.push(Symmetry {
            slots: slots.to_vec(),
            kind,
        });
        Ok(self)
    }

    pub fn without_symmetries(mut self) -> Self {
        self.symmetries.clear();
        self
    }

    pub fn map<T: Scalar, F: FnMut(&S) -> T>(&self, f: F) -> Tensor<T> {
        Tensor {
            dim: self.dim,
            variances: self.variances.clone(),
            data: self.data.iter().map(f).collect(),
            symmetries: Vec::new(),
        }
    }

    pub fn try_map<T: Scalar, F: FnMut(&S) -> Result<T>>(&self, f: F) -> Result<Tensor<T>> {
        Ok(Tensor {
            dim: self.dim,
            variances: self.variances.clone(),
            data: self.data.iter().map(f).collect::<Result<_>>()?,
            symmetries: Vec::new(),
        })
    }

    /// `T'[idx] = T[idx[pattern[0]], idx[pattern[1]], ...]`.
    ///
    /// With a rank-4 `R` indexed `(i, j, k, l)`, `reindex(&[0, 2, 3, 1])` is the tensor
    /// whose `(i, j, k, l)` entry is `R_{iklj}`.
    pub fn reindex(&self, pattern: &[usize]) -> Self {
        let rank = self.rank();
        assert_eq!(pattern.len(), rank, "reindex pattern length");
        let mut variances = self.variances.clone();
        for (s, &t) in pattern.iter().enumerate() {
            variances[t] = self.variances[s];
        }
        let mut src = vec![0; rank];
        let data = multi_indices(self.dim, rank)
            .map(|idx| {
                for (s, &t) in pattern.iter().enumerate() {
                    src[s] = idx[t];
                }
                self.get(&src).clone()
            })
            .collect();
        Self {
            dim: self.dim,
            variances,
            data,
            symmetries: Vec::new(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.variances != other.variances {
            return Err(Error::Shape(format!(
                "tensors of shape {:?} (dim {}) and {:?} (dim {})",
                self.variances, self.dim, other.variances, other.dim
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, S::add))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(self.zip_with(other, S::sub))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Self {
            dim: self.dim,
            variances: self.variances.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(a, b))
                .collect(),
            symmetries: Vec::new(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            dim: self.dim,
            variances: self.variances.clone(),
            data: self.data.iter().map(|v| v.scale(c)).collect(),
            symmetries: self.symmetries.clone(),
        }
    }

    /// `sum_t c_t * T_t` over tensors of a common shape.
    pub fn linear_combination(terms: &[(Rational, &Self)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::Shape("empty linear combination".into()))?;
        let mut acc = first.scale(&terms[0].0).without_symmetries();
        for (c, t) in &terms[1..] {
            acc = acc.try_add(&t.scale(c))?;
        }
        Ok(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(S::is_zero_value)
    }

    /// First multi-index with a nonzero entry.
    pub fn first_nonzero(&self) -> Option<Vec<usize>> {
        self.entries()
            .find(|(_, v)| !v.is_zero_value())
            .map(|(idx, _)| idx)
    }

    /// First multi-index where `self` and `other` differ.
    pub fn first_difference(&self, other: &Self) -> Option<Vec<usize>> {
        if self.dim != other.dim || self.rank() != other.rank() {
            return Some(Vec::new());
        }
        self.entries()
            .zip(other.data.iter())
            .find(|((_, a), b)| a != b)
            .map(|((idx, _), _)| idx)
    }

    /// Entrywise equality ignoring declared-symmetry metadata.
    pub fn same_entries(&self, other: &Self) -> bool {
        self.dim == other.dim && self.variances == other.variances && self.data == other.data
    }
}

impl JetTensor {
    /// Value of every entry at the origin; declared symmetries carry over.
    pub fn at_origin(&self) -> PointTensor {
        Tensor {
            dim: self.dim,
            variances: self.variances.clone(),
            data: self.data.iter().map(Jet::constant_term).collect(),
            symmetries: self.symmetries.clone(),
        }
    }

    /// Truncates every entry; declared symmetries carry over.
    pub fn truncate(&self, order: usize) -> JetTensor {
        Tensor {
            dim: self.dim,
            variances: self.variances.clone(),
            data: self.data.iter().map(|j| j.truncate(order)).collect(),
            symmetries: self.symmetries.clone(),
        }
    }

    /// Smallest order among the entries.
    pub fn order(&self) -> usize {
        self.data.iter().map(Jet::order).min().unwrap_or(0)
    }

    pub fn n_vars(&self) -> usize {
        self.data.first().map(Jet::n_vars).unwrap_or(self.dim)
    }

    /// Appends a lower slot holding the coordinate partials: `G[.., k] = d_k T[..]`.
    pub fn gradient(&self) -> Result<JetTensor> {
        let rank = self.rank();
        let mut variances = self.variances.clone();
        variances.push(Variance::Down);
        Tensor::try_from_fn(self.dim, variances, |idx| {
            self.get(&idx[..rank]).partial(idx[rank])
        })
    }
}

impl PointTensor {
    pub fn zeros(dim: usize, variances: Vec<Variance>) -> Self {
        Self::from_fn(dim, variances, |_| Rational::zero())
    }

    /// Kronecker delta as a (1,1) tensor.
    pub fn delta(dim: usize) -> Self {
        Self::from_fn(dim, vec![Variance::Up, Variance::Down], |idx| {
            if idx[0] == idx[1] {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    /// Lifts point data to constant jets.
    pub fn to_jets(&self, n_vars: usize, order: usize) -> JetTensor {
        Tensor {
            dim: self.dim,
            variances: self.variances.clone(),
            data: self
                .data
                .iter()
                .map(|c| Jet::constant(n_vars, order, c.clone()))
                .collect(),
            symmetries: self.symmetries.clone(),
        }
    }
}

fn check_form<S: Scalar>(form: &Tensor<S>, dim: usize, variance: Variance) -> Result<()> {
    if form.rank() != 2 || form.dim != dim || form.variances.iter().any(|&v| v != variance) {
        return Err(Error::Shape(format!(
            "expected a rank-2 form with {variance:?} slots of dimension {dim}"
        )));
    }
    Ok(())
}

/// Lowers an upper slot with `omega`: the new lower index is `sum_m omega_{i m} T^{..m..}`.
pub fn omega_lower<S: Scalar>(t: &Tensor<S>, slot: usize, omega: &Tensor<S>) -> Result<Tensor<S>> {
    move_index(t, slot, omega, Variance::Up, Variance::Down)
}

/// Raises a lower slot with the inverse form: `sum_m omega^{i m} T_{..m..}`.
pub fn omega_raise<S: Scalar>(
    t: &Tensor<S>,
    slot: usize,
    omega_inv: &Tensor<S>,
) -> Result<Tensor<S>> {
    move_index(t, slot, omega_inv, Variance::Down, Variance::Up)
}

fn move_index<S: Scalar>(
    t: &Tensor<S>,
    slot: usize,
    form: &Tensor<S>,
    from: Variance,
    to: Variance,
) -> Result<Tensor<S>> {
    if slot >= t.rank() {
        return Err(Error::Index {
            index: slot,
            bound: t.rank(),
        });
    }
    if t.variances[slot] != from {
        return Err(Error::Shape(format!("slot {slot} is not {from:?}")));
    }
    let form_variance = to;
    check_form(form, t.dim, form_variance)?;
    let mut variances = t.variances.clone();
    variances[slot] = to;
    let mut src = vec![0; t.rank()];
    let out = Tensor::from_fn(t.dim, variances, |idx| {
        src.copy_from_slice(idx);
        let i = idx[slot];
        let mut acc: Option<S> = None;
        for m in 0..t.dim {
            src[slot] = m;
            let term = form.get(&[i, m]).mul(t.get(&src));
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term),
            });
        }
        acc.expect("dimension is positive")
    });
    Ok(out)
}

/// Sums over a pair of opposite-variance slots; both slots are removed.
pub fn contract<S: Scalar>(a: &Tensor<S>, slot_up: usize, slot_down: usize) -> Result<Tensor<S>> {
    let rank = a.rank();
    for s in [slot_up, slot_down] {
        if s >= rank {
            return Err(Error::Index {
                index: s,
                bound: rank,
            });
        }
    }
    if slot_up == slot_down
        || a.variances[slot_up] != Variance::Up
        || a.variances[slot_down] != Variance::Down
    {
        return Err(Error::Shape(format!(
            "contraction needs an upper slot and a distinct lower slot, got {slot_up} and {slot_down}"
        )));
    }
    contract_unchecked(a, slot_up, slot_down)
}

/// Sums over two slots regardless of variance (used when a form has already been applied).
pub(crate) fn contract_unchecked<S: Scalar>(
    a: &Tensor<S>,
    s1: usize,
    s2: usize,
) -> Result<Tensor<S>> {
    let rank = a.rank();
    let keep: Vec<usize> = (0..rank).filter(|&s| s != s1 && s != s2).collect();
    let variances = keep.iter().map(|&s| a.variances[s]).collect();
    let mut src = vec![0; rank];
    Ok(Tensor::from_fn(a.dim, variances, |idx| {
        for (pos, &s) in keep.iter().enumerate() {
            src[s] = idx[pos];
        }
        let mut acc: Option<S> = None;
        for m in 0..a.dim {
            src[s1] = m;
            src[s2] = m;
            let v = a.get(&src).clone();
            acc = Some(match acc {
                None => v,
                Some(x) => x.add(&v),
            });
        }
        acc.expect("dimension is positive")
    }))
}

/// Symmetrizes, antisymmetrizes (both normalized by `1/m!`) or cyclically sums
/// (unnormalized) over the listed slots.
pub fn sym_project<S: Scalar>(t: &Tensor<S>, slots: &[usize], mode: SymMode) -> Result<Tensor<S>> {
    if let Some(&bad) = slots.iter().find(|&&s| s >= t.rank()) {
        return Err(Error::Index {
            index: bad,
            bound: t.rank(),
        });
    }
    if slots
        .windows(2)
        .any(|w| t.variances[w[0]] != t.variances[w[1]])
    {
        return Err(Error::Shape("slots of different variance".into()));
    }
    let m = slots.len();
    let perms: Vec<(Vec<usize>, bool)> = match mode {
        SymMode::CyclicSum => (0..m)
            .map(|s| ((0..m).map(|p| (p + s) % m).collect(), false))
            .collect(),
        _ => permutations(m),
    };
    let mut factorial = Rational::one();
    for f in 2..=m {
        factorial *= Rational::from_integer((f as i64).into());
    }
    let norm = match mode {
        SymMode::CyclicSum => Rational::one(),
        _ => factorial.recip(),
    };
    let mut src = vec![0; t.rank()];
    Ok(Tensor::from_fn(t.dim, t.variances.clone(), |idx| {
        src.copy_from_slice(idx);
        let mut acc: Option<S> = None;
        for (perm, odd) in &perms {
            for (p, &slot) in slots.iter().enumerate() {
                src[slot] = idx[slots[perm[p]]];
            }
            let mut v = t.get(&src).clone();
            if mode == SymMode::Antisymmetrize && *odd {
                v = v.neg();
            }
            acc = Some(match acc {
                None => v,
                Some(a) => a.add(&v),
            });
        }
        acc.expect("at least one permutation").scale(&norm)
    }))
}

/// Number of terms in the pair-replacement sum over `{j, k, a_1..a_r}`.
pub fn veblen_term_count(r: usize) -> usize {
    (r + 2) * (r + 1) / 2
}

/// Pair-replacement sum of a normal-tensor candidate `A_{i j k a_1 .. a_r}`: every unordered
/// pair `{p, q}` of positions among the trailing `r + 2` slots is moved into slots 1, 2,
/// the remaining indices keep their relative order. The result vanishes on genuine
/// normal tensors.
pub fn veblen_sum<S: Scalar>(a: &Tensor<S>) -> Result<Tensor<S>> {
    let rank = a.rank();
    if rank < 4 {
        return Err(Error::Shape(format!(
            "pair-replacement sum needs rank >= 4, got {rank}"
        )));
    }
    if let Some(w) = a.symmetry_witness(&[1, 2], SymmetryKind::Symmetric) {
        return Err(Error::Precondition(format!(
            "not symmetric in slots 1, 2 at {w:?}"
        )));
    }
    let trailing: Vec<usize> = (3..rank).collect();
    if let Some(w) = a.symmetry_witness(&trailing, SymmetryKind::Symmetric) {
        return Err(Error::Precondition(format!(
            "not symmetric in the trailing block at {w:?}"
        )));
    }
    let block = rank - 1;
    let mut pairs = Vec::new();
    for p in 0..block {
        for q in (p + 1)..block {
            pairs.push((p, q));
        }
    }
    let mut src = vec![0; rank];
    Ok(Tensor::from_fn(a.dim, a.variances.clone(), |idx| {
        let j = &idx[1..];
        let mut acc: Option<S> = None;
        for &(p, q) in &pairs {
            src[0] = idx[0];
            src[1] = j[p];
            src[2] = j[q];
            let mut pos = 3;
            for (s, &v) in j.iter().enumerate() {
                if s != p && s != q {
                    src[pos] = v;
                    pos += 1;
                }
            }
            let v = a.get(&src).clone();
            acc = Some(match acc {
                None => v,
                Some(x) => x.add(&v),
            });
        }
        acc.expect("at least one pair")
    }))
}
