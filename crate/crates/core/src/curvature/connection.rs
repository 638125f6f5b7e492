use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Series;
use crate::fourier::{OmegaDoc, Symmetry, SymplecticData, TensorDoc, TensorField};

/// A formal curve `∇^t = ∇⁰ + Σ_{k≥1} t^k A^(k)` of symplectic connections on
/// the torus, truncated at order `cap`.
///
/// Each order is stored lowered, `Ā^(k)_{abc} = ω(A^(k)(e_a)e_b, e_c)`, which
/// must be fully symmetric. The raised coefficients
/// `Γ^c_{ab}(k) = Σ_d Ā^(k)_{abd} ω^{dc}` are cached alongside.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionCurve {
    sd: SymplecticData,
    cap: usize,
    a: Vec<TensorField>,
    gamma: Vec<TensorField>,
}

impl ConnectionCurve {
    /// The constant curve at the flat connection `∇⁰`.
    pub fn flat(sd: SymplecticData, cap: usize) -> Self {
        let zero = TensorField::zeros(sd.dim(), 3).tag_unchecked(Symmetry::FullySymmetric);
        ConnectionCurve { cap, a: vec![zero.clone(); cap + 1], gamma: vec![zero; cap + 1], sd }
    }

    /// Builds a curve from `Ā^(1)..Ā^(K)`; `orders.len()` sets the cap.
    pub fn new(sd: SymplecticData, orders: Vec<TensorField>) -> Result<Self> {
        let cap = orders.len();
        let mut a = Vec::with_capacity(cap + 1);
        a.push(TensorField::zeros(sd.dim(), 3).tag_unchecked(Symmetry::FullySymmetric));
        for (k, t) in orders.into_iter().enumerate() {
            if t.dim() != sd.dim() || t.rank() != 3 {
                return Err(Error::shape(format!(
                    "order {}: expected a rank-3 field in dimension {}, got rank {} dimension {}",
                    k + 1,
                    sd.dim(),
                    t.rank(),
                    t.dim()
                )));
            }
            t.validate_reality()?;
            a.push(t.with_symmetry(Symmetry::FullySymmetric)?);
        }
        let gamma = a.iter().map(|t| raise_last(&sd, t)).collect::<Result<Vec<_>>>()?;
        Ok(ConnectionCurve { sd, cap, a, gamma })
    }

    pub fn sdata(&self) -> &SymplecticData {
        &self.sd
    }

    pub fn dim(&self) -> usize {
        self.sd.dim()
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `Ā^(k)`; order 0 is identically zero.
    pub fn a_under(&self, k: usize) -> &TensorField {
        &self.a[k]
    }

    /// `Γ^c_{ab}(k)` stored at index `[a, b, c]`.
    pub fn gamma(&self, k: usize) -> &TensorField {
        &self.gamma[k]
    }

    /// `Ā^(1)..Ā^(K)`.
    pub fn orders(&self) -> &[TensorField] {
        &self.a[1..]
    }

    pub fn as_series(&self) -> Series<TensorField> {
        Series::from_coeffs(self.cap, self.a.clone()).expect("cap + 1 coefficients")
    }

    /// Smallest order carrying a non-constant component.
    pub fn first_non_invariant_order(&self) -> Option<usize> {
        (1..=self.cap).find(|&k| !self.a[k].is_invariant())
    }

    pub fn is_invariant(&self) -> bool {
        self.first_non_invariant_order().is_none()
    }

    pub fn is_flat_base_only(&self) -> bool {
        self.a.iter().all(TensorField::is_zero)
    }

    pub fn truncate(&self, cap: usize) -> Result<Self> {
        if cap > self.cap {
            return Err(Error::CapMismatch { left: self.cap, right: cap });
        }
        Ok(ConnectionCurve {
            sd: self.sd.clone(),
            cap,
            a: self.a[..=cap].to_vec(),
            gamma: self.gamma[..=cap].to_vec(),
        })
    }

    /// Copy with order `k ≥ 1` replaced.
    pub fn with_order(&self, k: usize, t: TensorField) -> Result<Self> {
        if k == 0 || k > self.cap {
            return Err(Error::pre(format!("order {k} outside 1..={}", self.cap)));
        }
        let mut orders = self.orders().to_vec();
        orders[k - 1] = t;
        Self::new(self.sd.clone(), orders)
    }

    pub fn to_doc(&self) -> ConnectionDoc {
        ConnectionDoc {
            dim: self.dim(),
            cap: self.cap,
            omega: OmegaDoc(self.sd.to_doc()),
            a: self.orders().iter().map(TensorField::to_doc).collect(),
        }
    }

    pub fn from_doc(doc: &ConnectionDoc) -> Result<Self> {
        let sd = SymplecticData::from_doc(&doc.omega.0)?;
        if sd.dim() != doc.dim {
            return Err(Error::parse(format!("omega has size {} but dim is {}", sd.dim(), doc.dim)));
        }
        if doc.a.len() != doc.cap {
            return Err(Error::parse(format!("cap is {} but {} orders are listed", doc.cap, doc.a.len())));
        }
        let orders = doc
            .a
            .iter()
            .enumerate()
            .map(|(k, t)| {
                if t.rank != 3 {
                    return Err(Error::parse(format!("order {}: rank {} instead of 3", k + 1, t.rank)));
                }
                TensorField::from_doc(doc.dim, t)
                    .and_then(|t| t.with_symmetry(Symmetry::FullySymmetric))
                    .map_err(|e| match e {
                    Error::Asymmetric { idx, other } => Error::parse(format!(
                        "order {}: entry {idx:?} differs from its symmetric partner {other:?}",
                        k + 1
                    )),
                    e => e,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(sd, orders)
    }
}

fn raise_last(sd: &SymplecticData, t: &TensorField) -> Result<TensorField> {
    t.raise_slot(sd, 2)
}

/// Serialized connection curve; `A` lists orders `1..=cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectionDoc {
    pub dim: usize,
    pub cap: usize,
    pub omega: OmegaDoc,
    #[serde(rename = "A")]
    pub a: Vec<TensorDoc>,
}
