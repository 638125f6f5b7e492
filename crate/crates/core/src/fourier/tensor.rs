use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::scalar::{FourierScalar, ModeEntry};
use super::symplectic::SymplecticData;
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::series;
use crate::exec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    None,
    FullySymmetric,
    /// Rank 4, antisymmetric in the first pair and symmetric in the second.
    CurvatureType,
}

/// A tensor field on `T^{2n}` with Fourier-polynomial components, stored
/// densely over multi-indices (row-major, indices `0..dim`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorField {
    dim: usize,
    rank: usize,
    symmetry: Symmetry,
    comps: Vec<FourierScalar>,
}

fn pow(dim: usize, rank: usize) -> usize {
    dim.pow(rank as u32)
}

impl TensorField {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        TensorField { dim, rank, symmetry: Symmetry::None, comps: vec![FourierScalar::zero(dim); pow(dim, rank)] }
    }

    pub fn scalar(f: FourierScalar) -> Self {
        TensorField { dim: f.dim(), rank: 0, symmetry: Symmetry::None, comps: vec![f] }
    }

    /// Builds every component from its multi-index, in parallel when enabled.
    pub fn from_fn<F>(dim: usize, rank: usize, f: F) -> Self
    where
        F: Fn(&[usize]) -> FourierScalar + Send + Sync,
    {
        let comps = exec::map_range(pow(dim, rank), |flat| f(&unflatten(flat, dim, rank)));
        TensorField { dim, rank, symmetry: Symmetry::None, comps }
    }

    /// Constant components given by a rational function of the index.
    pub fn constant_from_fn(dim: usize, rank: usize, f: impl Fn(&[usize]) -> Rational) -> Self {
        let comps = (0..pow(dim, rank))
            .map(|flat| FourierScalar::constant(dim, f(&unflatten(flat, dim, rank))))
            .collect();
        TensorField { dim, rank, symmetry: Symmetry::None, comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn components(&self) -> &[FourierScalar] {
        &self.comps
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        unflatten(flat, self.dim, self.rank)
    }

    pub fn get(&self, idx: &[usize]) -> &FourierScalar {
        &self.comps[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: FourierScalar) {
        let i = self.flat_index(idx);
        self.comps[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(FourierScalar::is_empty)
    }

    /// First nonzero component, if any.
    pub fn first_nonzero(&self) -> Option<Vec<usize>> {
        self.comps.iter().position(|c| !c.is_empty()).map(|i| self.multi_index(i))
    }

    /// True when every component is a constant (`T^{2n}`-invariant field).
    pub fn is_invariant(&self) -> bool {
        self.comps.iter().all(FourierScalar::is_constant)
    }

    /// First component carrying a nonzero mode, if any.
    pub fn first_non_invariant(&self) -> Option<Vec<usize>> {
        self.comps.iter().position(|c| !c.is_constant()).map(|i| self.multi_index(i))
    }

    /// Zero-mode part of each component.
    pub fn mean_values(&self) -> Vec<Rational> {
        self.comps.iter().map(FourierScalar::mean).collect()
    }

    pub fn max_support(&self) -> usize {
        self.comps.iter().map(FourierScalar::len).max().unwrap_or(0)
    }

    pub fn total_support(&self) -> usize {
        self.comps.iter().map(FourierScalar::len).sum()
    }

    /// Tags the field after checking the claimed symmetry.
    pub fn with_symmetry(mut self, sym: Symmetry) -> Result<Self> {
        self.check_symmetry(sym)?;
        self.symmetry = sym;
        Ok(self)
    }

    pub(crate) fn tag_unchecked(mut self, sym: Symmetry) -> Self {
        self.symmetry = sym;
        self
    }

    pub fn check_symmetry(&self, sym: Symmetry) -> Result<()> {
        match sym {
            Symmetry::None => Ok(()),
            Symmetry::FullySymmetric => {
                for flat in 0..self.comps.len() {
                    let idx = self.multi_index(flat);
                    let mut sorted = idx.clone();
                    sorted.sort_unstable();
                    if sorted != idx && self.get(&sorted) != &self.comps[flat] {
                        return Err(Error::Asymmetric { idx, other: sorted });
                    }
                }
                Ok(())
            }
            Symmetry::CurvatureType => {
                if self.rank != 4 {
                    return Err(Error::shape(format!("curvature type needs rank 4, got {}", self.rank)));
                }
                for flat in 0..self.comps.len() {
                    let idx = self.multi_index(flat);
                    let (a, b, c, d) = (idx[0], idx[1], idx[2], idx[3]);
                    let here = &self.comps[flat];
                    if self.get(&[b, a, c, d]) != &here.neg() {
                        return Err(Error::Asymmetric { idx, other: vec![b, a, c, d] });
                    }
                    if self.get(&[a, b, d, c]) != here {
                        return Err(Error::Asymmetric { idx, other: vec![a, b, d, c] });
                    }
                }
                Ok(())
            }
        }
    }

    pub fn validate_reality(&self) -> Result<()> {
        self.comps.iter().try_for_each(FourierScalar::validate_reality)
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.rank != other.rank {
            return Err(Error::shape(format!(
                "tensor shapes differ: dim {} rank {} vs dim {} rank {}",
                self.dim, self.rank, other.dim, other.rank
            )));
        }
        Ok(())
    }

    fn combined_symmetry(&self, other: &Self) -> Symmetry {
        if self.symmetry == other.symmetry {
            self.symmetry
        } else {
            Symmetry::None
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(TensorField {
            dim: self.dim,
            rank: self.rank,
            symmetry: self.combined_symmetry(other),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        Ok(TensorField {
            dim: self.dim,
            rank: self.rank,
            symmetry: self.combined_symmetry(other),
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect(),
        })
    }

    pub fn neg(&self) -> Self {
        TensorField { comps: self.comps.iter().map(FourierScalar::neg).collect(), ..self.clone_shape() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        TensorField { comps: self.comps.iter().map(|c| c.scale(r)).collect(), ..self.clone_shape() }
    }

    /// Multiplies every component by a scalar field.
    pub fn mul_scalar_field(&self, f: &FourierScalar) -> Self {
        TensorField { comps: self.comps.iter().map(|c| c.mul(f)).collect(), ..self.clone_shape() }
    }

    fn clone_shape(&self) -> Self {
        TensorField { dim: self.dim, rank: self.rank, symmetry: self.symmetry, comps: Vec::new() }
    }

    /// `∂_a` applied to every component (same rank).
    pub fn derivative(&self, a: usize) -> Result<Self> {
        if a >= self.dim {
            return Err(Error::IndexOutOfRange { index: a, dim: self.dim });
        }
        Ok(TensorField {
            comps: self.comps.iter().map(|c| c.derivative(a).expect("index checked")).collect(),
            ..self.clone_shape()
        })
    }

    /// The flat derivative `∂T`, with the new index in the first slot.
    pub fn gradient(&self) -> Self {
        let per_dir: Vec<Vec<FourierScalar>> = (0..self.dim)
            .map(|a| self.comps.iter().map(|c| c.derivative(a).expect("in range")).collect())
            .collect();
        TensorField {
            dim: self.dim,
            rank: self.rank + 1,
            symmetry: Symmetry::None,
            comps: per_dir.into_iter().flatten().collect(),
        }
    }

    /// Tensor product, indices of `self` first.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::shape("tensor product of different dimensions"));
        }
        let n2 = other.comps.len();
        let comps = exec::map_range(self.comps.len() * n2, |flat| self.comps[flat / n2].mul(&other.comps[flat % n2]));
        Ok(TensorField { dim: self.dim, rank: self.rank + other.rank, symmetry: Symmetry::None, comps })
    }

    /// Plain trace over two slots (no metric): `Σ_q T_{..q..q..}`.
    pub fn trace_slots(&self, i: usize, j: usize) -> Result<Self> {
        self.contract_with(i, j, |p, q| if p == q { Some(rational::one()) } else { None })
    }

    /// `Σ_{p,q} ω^{pq} T_{..p..q..}` over slots `i < j` or `i > j`.
    pub fn contract_with_omega_hi(&self, sd: &SymplecticData, i: usize, j: usize) -> Result<Self> {
        self.contract_with(i, j, |p, q| {
            let w = sd.hi(p, q);
            if w == &rational::zero() {
                None
            } else {
                Some(w.clone())
            }
        })
    }

    fn contract_with<F>(&self, i: usize, j: usize, weight: F) -> Result<Self>
    where
        F: Fn(usize, usize) -> Option<Rational> + Sync,
    {
        if i == j || i >= self.rank || j >= self.rank {
            return Err(Error::shape(format!("cannot contract slots {i},{j} of a rank-{} tensor", self.rank)));
        }
        if self.dim != 0 && self.comps.first().is_some_and(|c| c.dim() != self.dim) {
            return Err(Error::shape("component dimension mismatch"));
        }
        let out_rank = self.rank - 2;
        let dim = self.dim;
        let comps = exec::map_range(pow(dim, out_rank), |flat| {
            let rest = unflatten(flat, dim, out_rank);
            let mut idx = vec![0usize; self.rank];
            let mut acc = FourierScalar::zero(dim);
            for p in 0..dim {
                for q in 0..dim {
                    let Some(w) = weight(p, q) else { continue };
                    let mut it = rest.iter();
                    for (s, slot) in idx.iter_mut().enumerate() {
                        *slot = if s == i {
                            p
                        } else if s == j {
                            q
                        } else {
                            *it.next().expect("rank arithmetic")
                        };
                    }
                    let c = self.get(&idx);
                    if !c.is_empty() {
                        acc = acc.add(&c.scale(&w));
                    }
                }
            }
            acc
        });
        Ok(TensorField { dim, rank: out_rank, symmetry: Symmetry::None, comps })
    }

    /// Lowers slot `s` with ω: `out_{..c..} = Σ_q T_{..q..} ω_{qc}`.
    pub fn lower_slot(&self, sd: &SymplecticData, s: usize) -> Result<Self> {
        self.mix_slot(s, |q, c| sd.lo(q, c).clone())
    }

    /// Inverse of [`lower_slot`](Self::lower_slot): `out_{..p..} = Σ_c T_{..c..} ω^{cp}`.
    pub fn raise_slot(&self, sd: &SymplecticData, s: usize) -> Result<Self> {
        self.mix_slot(s, |c, p| sd.hi(c, p).clone())
    }

    /// Applies a constant matrix to one slot: `out_{..j..} = Σ_i M(i, j) T_{..i..}`.
    pub fn mix_slot(&self, s: usize, m: impl Fn(usize, usize) -> Rational + Sync) -> Result<Self> {
        if s >= self.rank {
            return Err(Error::shape(format!("slot {s} out of range for rank {}", self.rank)));
        }
        let dim = self.dim;
        let comps = exec::map_range(self.comps.len(), |flat| {
            let mut idx = unflatten(flat, dim, self.rank);
            let target = idx[s];
            let mut acc = FourierScalar::zero(dim);
            for i in 0..dim {
                let w = m(i, target);
                if w == rational::zero() {
                    continue;
                }
                idx[s] = i;
                let c = self.get(&idx);
                if !c.is_empty() {
                    acc = acc.add(&c.scale(&w));
                }
            }
            acc
        });
        Ok(TensorField { dim, rank: self.rank, symmetry: Symmetry::None, comps })
    }

    /// Reorders slots: `out[idx] = self[idx ∘ perm]`, i.e. slot `k` of the
    /// output reads slot `perm[k]` of the input.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let dim = self.dim;
        let rank = self.rank;
        let comps = (0..self.comps.len())
            .map(|flat| {
                let out_idx = unflatten(flat, dim, rank);
                let mut in_idx = vec![0; rank];
                for (k, &p) in perm.iter().enumerate() {
                    in_idx[p] = out_idx[k];
                }
                self.get(&in_idx).clone()
            })
            .collect();
        TensorField { dim, rank, symmetry: Symmetry::None, comps }
    }

    /// Average over all slot permutations.
    pub fn symmetrize(&self) -> Self {
        if self.rank <= 1 {
            return self.clone().tag_unchecked(Symmetry::FullySymmetric);
        }
        let perms: Vec<Vec<usize>> = (0..self.rank).permutations(self.rank).collect();
        let weight = rational::rat(1, perms.len() as i64);
        let dim = self.dim;
        let rank = self.rank;
        let comps = exec::map_range(self.comps.len(), |flat| {
            let idx = unflatten(flat, dim, rank);
            let mut acc = FourierScalar::zero(dim);
            let mut permuted = vec![0; rank];
            for p in &perms {
                for (k, &pk) in p.iter().enumerate() {
                    permuted[k] = idx[pk];
                }
                acc = acc.add(self.get(&permuted));
            }
            acc.scale(&weight)
        });
        TensorField { dim, rank, symmetry: Symmetry::FullySymmetric, comps }
    }

    /// `(T − T with slots i, j swapped) / 2`.
    pub fn antisymmetrize_pair(&self, i: usize, j: usize) -> Result<Self> {
        if i >= self.rank || j >= self.rank || i == j {
            return Err(Error::shape(format!("bad slot pair {i},{j} for rank {}", self.rank)));
        }
        let mut perm: Vec<usize> = (0..self.rank).collect();
        perm.swap(i, j);
        let swapped = self.permute(&perm);
        Ok(self.sub(&swapped)?.scale(&rational::rat(1, 2)).tag_unchecked(Symmetry::None))
    }

    /// Cyclic sum over slots `(i, j, k)`.
    pub fn cyclic_sum(&self, i: usize, j: usize, k: usize) -> Result<Self> {
        let id: Vec<usize> = (0..self.rank).collect();
        let mut p1 = id.clone();
        p1[i] = j;
        p1[j] = k;
        p1[k] = i;
        let mut p2 = id.clone();
        p2[i] = k;
        p2[j] = i;
        p2[k] = j;
        self.add(&self.permute(&p1))?.add(&self.permute(&p2))
    }

    pub fn to_doc(&self) -> TensorDoc {
        let entries = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(flat, c)| EntryDoc { idx: self.multi_index(flat), modes: c.to_entries() })
            .collect();
        TensorDoc { rank: self.rank, symmetry: self.symmetry, entries }
    }

    pub fn from_doc(dim: usize, doc: &TensorDoc) -> Result<Self> {
        let mut t = TensorField::zeros(dim, doc.rank);
        for e in &doc.entries {
            if e.idx.len() != doc.rank || e.idx.iter().any(|&i| i >= dim) {
                return Err(Error::parse(format!("entry index {:?} invalid for dim {dim}, rank {}", e.idx, doc.rank)));
            }
            let f = FourierScalar::from_entries(dim, &e.modes).map_err(|err| match err {
                Error::NotReal { mode } => {
                    Error::parse(format!("entry {:?}: mode {mode:?} breaks reality", e.idx))
                }
                other => other,
            })?;
            let flat = t.flat_index(&e.idx);
            if !t.comps[flat].is_empty() {
                return Err(Error::parse(format!("duplicate entry {:?}", e.idx)));
            }
            t.comps[flat] = f;
        }
        t.with_symmetry(doc.symmetry)
    }
}

/// Exact equality of all components and modes; false on shape mismatch.
pub fn field_equal(a: &TensorField, b: &TensorField) -> bool {
    a.dim == b.dim && a.rank == b.rank && a.comps == b.comps
}

pub(crate) fn unflatten(mut flat: usize, dim: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for s in (0..rank).rev() {
        idx[s] = flat % dim;
        flat /= dim;
    }
    idx
}

impl series::Coeff for TensorField {
    fn zero_like(&self) -> Self {
        TensorField::zeros(self.dim, self.rank).tag_unchecked(self.symmetry)
    }
    fn is_zero(&self) -> bool {
        TensorField::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other).expect("series coefficients share a shape")
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn scale(&self, r: &Rational) -> Self {
        TensorField::scale(self, r)
    }
}

/// Serialized tensor field; entries sorted by index, then by mode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorDoc {
    pub rank: usize,
    pub symmetry: Symmetry,
    pub entries: Vec<EntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryDoc {
    pub idx: Vec<usize>,
    pub modes: Vec<ModeEntry>,
}
