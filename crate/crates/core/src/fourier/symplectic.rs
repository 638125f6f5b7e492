use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::linalg::RatMatrix;

/// A constant symplectic form on ℝ^{2n} (equivalently a `T^{2n}`-invariant one
/// on the torus).
///
/// `lo[(a, b)] = ω_{ab} = ω(e_a, e_b)` and `hi` is its matrix inverse, so
/// `ω^{pq} ω_{ql} = δ^p_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticData {
    dim: usize,
    lo: RatMatrix,
    hi: RatMatrix,
}

impl SymplecticData {
    /// The block form with `ω(e_i, e_{n+i}) = 1`.
    pub fn standard(dim: usize) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidSymplectic(format!("dimension {dim} is not a positive even number")));
        }
        let n = dim / 2;
        let lo = RatMatrix::from_fn(dim, dim, |i, j| {
            if j == i + n {
                rational::int(1)
            } else if i == j + n {
                rational::int(-1)
            } else {
                rational::int(0)
            }
        });
        Self::new(lo)
    }

    pub fn new(lo: RatMatrix) -> Result<Self> {
        let dim = lo.rows();
        if !lo.is_square() || dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::InvalidSymplectic(format!(
                "omega must be square of even size, got {}x{}",
                lo.rows(),
                lo.cols()
            )));
        }
        if !lo.is_antisymmetric() {
            return Err(Error::InvalidSymplectic("omega is not antisymmetric".into()));
        }
        let hi = lo
            .inverse()
            .map_err(|_| Error::InvalidSymplectic("omega is degenerate".into()))?;
        Ok(SymplecticData { dim, lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `n` in `dim = 2n`.
    pub fn half_dim(&self) -> usize {
        self.dim / 2
    }

    pub fn lo(&self, a: usize, b: usize) -> &Rational {
        &self.lo[(a, b)]
    }

    pub fn hi(&self, a: usize, b: usize) -> &Rational {
        &self.hi[(a, b)]
    }

    pub fn lo_matrix(&self) -> &RatMatrix {
        &self.lo
    }

    pub fn hi_matrix(&self) -> &RatMatrix {
        &self.hi
    }

    /// `ω(x, y)` for coordinate vectors.
    pub fn pair(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let mut acc = rational::zero();
        for a in 0..self.dim {
            if x[a] == rational::zero() {
                continue;
            }
            for b in 0..self.dim {
                if y[b] != rational::zero() && self.lo[(a, b)] != rational::zero() {
                    acc += &x[a] * &self.lo[(a, b)] * &y[b];
                }
            }
        }
        acc
    }

    /// Whether `Cᵀ ω C = ω`.
    pub fn preserves(&self, c: &RatMatrix) -> bool {
        c.rows() == self.dim
            && c.cols() == self.dim
            && c.transpose()
                .mul(&self.lo)
                .and_then(|m| m.mul(c))
                .map(|m| m == self.lo)
                .unwrap_or(false)
    }

    pub fn require_theorem_dim(&self) -> Result<()> {
        if self.dim < 4 {
            return Err(Error::pre(format!(
                "Ricci-type statements need dimension at least 4, got {}",
                self.dim
            )));
        }
        Ok(())
    }

    pub fn to_doc(&self) -> Vec<Vec<String>> {
        self.lo
            .to_rows()
            .iter()
            .map(|r| r.iter().map(rational::to_string).collect())
            .collect()
    }

    pub fn from_doc(rows: &[Vec<String>]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::new(RatMatrix::from_rows(rows)?)
    }
}

/// Serialized form of ω: rows of rational strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OmegaDoc(pub Vec<Vec<String>>);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_convention() {
        let s = SymplecticData::standard(4).unwrap();
        // ω^{pq} ω_{ql} = δ^p_l
        assert_eq!(s.hi_matrix().mul(s.lo_matrix()).unwrap(), RatMatrix::identity(4));
        assert_eq!(s.lo(0, 2), &rational::int(1));
        assert_eq!(s.hi(2, 0), &rational::int(1));
    }

    #[test]
    fn rejects_bad_forms() {
        assert!(SymplecticData::standard(3).is_err());
        let sym = RatMatrix::from_i64_rows(&[&[0, 1], &[1, 0]]).unwrap();
        assert!(SymplecticData::new(sym).is_err());
        let degenerate = RatMatrix::zeros(2, 2);
        assert!(SymplecticData::new(degenerate).is_err());
    }

    #[test]
    fn custom_form_round_trips() {
        let lo = RatMatrix::from_i64_rows(&[&[0, 2, 0, 1], &[-2, 0, 1, 0], &[0, -1, 0, 3], &[-1, 0, -3, 0]]).unwrap();
        let s = SymplecticData::new(lo).unwrap();
        assert_eq!(SymplecticData::from_doc(&s.to_doc()).unwrap(), s);
    }
}
