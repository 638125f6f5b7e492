use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::series;
use crate::exact::Gaussian;

/// A lattice mode `m ∈ ℤ^{2n}`.
pub type Mode = Vec<i64>;

/// A real trigonometric polynomial `Σ_m c_m e^{i m·x}` on `T^{2n}`
/// (angles of period 2π).
///
/// Stored sparsely with no zero coefficients; reality means
/// `c_{-m} = conj(c_m)`. Public constructors enforce reality and every public
/// operation preserves it.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FourierScalar {
    dim: usize,
    coeffs: BTreeMap<Mode, Gaussian>,
}

/// One serialized Fourier coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeEntry {
    pub m: Mode,
    pub c: Gaussian,
}

fn neg_mode(m: &[i64]) -> Mode {
    m.iter().map(|x| -x).collect()
}

impl FourierScalar {
    pub fn zero(dim: usize) -> Self {
        FourierScalar { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(dim: usize, r: Rational) -> Self {
        let mut s = Self::zero(dim);
        if !r.is_zero() {
            s.coeffs.insert(vec![0; dim], Gaussian::real(r));
        }
        s
    }

    /// `cos(m·x)`.
    pub fn cos(mode: &[i64]) -> Self {
        let dim = mode.len();
        if mode.iter().all(|&x| x == 0) {
            return Self::constant(dim, rational::one());
        }
        let half = Gaussian::real(rational::rat(1, 2));
        let mut s = Self::zero(dim);
        s.coeffs.insert(mode.to_vec(), half.clone());
        s.coeffs.insert(neg_mode(mode), half);
        s
    }

    /// `sin(m·x) = (e^{imx} − e^{−imx}) / 2i`.
    pub fn sin(mode: &[i64]) -> Self {
        let dim = mode.len();
        if mode.iter().all(|&x| x == 0) {
            return Self::zero(dim);
        }
        let c = Gaussian::imag(rational::rat(-1, 2));
        let mut s = Self::zero(dim);
        s.coeffs.insert(neg_mode(mode), c.conj());
        s.coeffs.insert(mode.to_vec(), c);
        s
    }

    /// Builds from explicit coefficients and rejects non-real data.
    pub fn from_modes(dim: usize, entries: impl IntoIterator<Item = (Mode, Gaussian)>) -> Result<Self> {
        let s = Self::from_modes_unchecked(dim, entries)?;
        s.validate_reality()?;
        Ok(s)
    }

    pub(crate) fn from_modes_unchecked(
        dim: usize,
        entries: impl IntoIterator<Item = (Mode, Gaussian)>,
    ) -> Result<Self> {
        let mut coeffs: BTreeMap<Mode, Gaussian> = BTreeMap::new();
        for (m, c) in entries {
            if m.len() != dim {
                return Err(Error::shape(format!("mode {m:?} has wrong length for dimension {dim}")));
            }
            *coeffs.entry(m).or_default() += &c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(FourierScalar { dim, coeffs })
    }

    pub fn validate_reality(&self) -> Result<()> {
        for (m, c) in &self.coeffs {
            let mirror = self.coeffs.get(&neg_mode(m));
            if mirror != Some(&c.conj()) {
                return Err(Error::NotReal { mode: m.clone() });
            }
        }
        Ok(())
    }

    pub fn is_real(&self) -> bool {
        self.validate_reality().is_ok()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &Gaussian)> {
        self.coeffs.iter()
    }

    pub fn coeff(&self, m: &[i64]) -> Option<&Gaussian> {
        self.coeffs.get(m)
    }

    /// The mean value (zero-mode coefficient), which is real.
    pub fn mean(&self) -> Rational {
        self.coeffs
            .get(&vec![0; self.dim])
            .map(|c| c.re.clone())
            .unwrap_or_else(Rational::zero)
    }

    /// True when only the zero mode is present (a `T^{2n}`-invariant function).
    pub fn is_constant(&self) -> bool {
        self.coeffs.keys().all(|m| m.iter().all(|&x| x == 0))
    }

    /// The non-constant part.
    pub fn oscillating_part(&self) -> Self {
        let mut s = self.clone();
        s.coeffs.remove(&vec![0; self.dim]);
        s
    }

    /// Largest `|m|_∞` over the support.
    pub fn max_mode(&self) -> i64 {
        self.coeffs
            .keys()
            .flat_map(|m| m.iter().map(|x| x.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn to_entries(&self) -> Vec<ModeEntry> {
        self.coeffs.iter().map(|(m, c)| ModeEntry { m: m.clone(), c: c.clone() }).collect()
    }

    pub fn from_entries(dim: usize, entries: &[ModeEntry]) -> Result<Self> {
        Self::from_modes(dim, entries.iter().map(|e| (e.m.clone(), e.c.clone())))
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "Fourier scalars of different dimensions");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_dim(other);
        let (mut big, small) = if self.len() >= other.len() { (self.clone(), other) } else { (other.clone(), self) };
        for (m, c) in &small.coeffs {
            match big.coeffs.get_mut(m) {
                Some(x) => {
                    *x += c;
                    if x.is_zero() {
                        big.coeffs.remove(m);
                    }
                }
                None => {
                    big.coeffs.insert(m.clone(), c.clone());
                }
            }
        }
        big
    }

    fn accumulate(&mut self, m: &[i64], c: Gaussian) {
        match self.coeffs.get_mut(m) {
            Some(x) => {
                *x += &c;
                if x.is_zero() {
                    self.coeffs.remove(m);
                }
            }
            None => {
                if !c.is_zero() {
                    self.coeffs.insert(m.to_vec(), c);
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.check_dim(other);
        for (m, c) in &other.coeffs {
            self.accumulate(m, c.clone());
        }
    }

    /// `self += r·other`.
    pub fn add_scaled_assign(&mut self, other: &Self, r: &Rational) {
        self.check_dim(other);
        if r.is_zero() {
            return;
        }
        for (m, c) in &other.coeffs {
            self.accumulate(m, c.scale(r));
        }
    }

    /// `self += r·a·b` without materializing the product.
    pub fn add_product_assign(&mut self, a: &Self, b: &Self, r: &Rational) {
        self.check_dim(a);
        self.check_dim(b);
        if r.is_zero() {
            return;
        }
        let mut key = vec![0i64; self.dim];
        for (m1, c1) in &a.coeffs {
            for (m2, c2) in &b.coeffs {
                for i in 0..self.dim {
                    key[i] = m1[i] + m2[i];
                }
                self.accumulate(&key, (c1 * c2).scale(r));
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        FourierScalar { dim: self.dim, coeffs: self.coeffs.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.dim);
        }
        if r.is_one() {
            return self.clone();
        }
        FourierScalar {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|(m, c)| (m.clone(), c.scale(r))).collect(),
        }
    }

    /// Pointwise product: a convolution of mode sets.
    pub fn mul(&self, other: &Self) -> Self {
        self.check_dim(other);
        if self.is_empty() || other.is_empty() {
            return Self::zero(self.dim);
        }
        if self.is_constant() {
            return other.mul_gaussian_const(&self.coeffs[&vec![0; self.dim]]);
        }
        if other.is_constant() {
            return self.mul_gaussian_const(&other.coeffs[&vec![0; self.dim]]);
        }
        let mut out: BTreeMap<Mode, Gaussian> = BTreeMap::new();
        let mut key = vec![0i64; self.dim];
        for (m1, c1) in &self.coeffs {
            for (m2, c2) in &other.coeffs {
                for i in 0..self.dim {
                    key[i] = m1[i] + m2[i];
                }
                let p = c1 * c2;
                match out.get_mut(&key) {
                    Some(x) => *x += &p,
                    None => {
                        out.insert(key.clone(), p);
                    }
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        FourierScalar { dim: self.dim, coeffs: out }
    }

    fn mul_gaussian_const(&self, g: &Gaussian) -> Self {
        FourierScalar { dim: self.dim, coeffs: self.coeffs.iter().map(|(m, c)| (m.clone(), c * g)).collect() }
    }

    /// `∂_a`, acting mode-wise as multiplication by `i·m_a`.
    pub fn derivative(&self, a: usize) -> Result<Self> {
        if a >= self.dim {
            return Err(Error::IndexOutOfRange { index: a, dim: self.dim });
        }
        Ok(FourierScalar {
            dim: self.dim,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m[a] != 0)
                .map(|(m, c)| (m.clone(), c.mul_i_int(m[a])))
                .collect(),
        })
    }

    /// Pre-composition with the affine torus map `x ↦ Cx + 2π·τ`.
    ///
    /// The mode `m` moves to `Cᵀm` and picks up the phase `e^{2πi m·τ}`, which
    /// must lie in {±1, ±i}, i.e. `4 m·τ ∈ ℤ`.
    pub fn compose_affine(&self, c: &[Vec<i64>], tau: &[Rational]) -> Result<Self> {
        let dim = self.dim;
        let mut out: BTreeMap<Mode, Gaussian> = BTreeMap::new();
        for (m, coeff) in &self.coeffs {
            let new_mode: Mode = (0..dim).map(|j| (0..dim).map(|i| c[i][j] * m[i]).sum()).collect();
            let mut phase = Rational::zero();
            for i in 0..dim {
                if m[i] != 0 && !tau[i].is_zero() {
                    phase += &tau[i] * rational::int(m[i]);
                }
            }
            let quarter_turns = phase * rational::int(4);
            let Some(k) = rational::to_i64(&quarter_turns) else {
                return Err(Error::NonRepresentablePhase(format!("{tau:?}")));
            };
            let v = coeff * &Gaussian::i_pow(k);
            *out.entry(new_mode).or_default() += &v;
        }
        out.retain(|_, c| !c.is_zero());
        Ok(FourierScalar { dim, coeffs: out })
    }
}

impl fmt::Debug for FourierScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}·e{m:?}")?;
        }
        Ok(())
    }
}

impl series::Coeff for FourierScalar {
    fn zero_like(&self) -> Self {
        FourierScalar::zero(self.dim)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn scale(&self, r: &Rational) -> Self {
        FourierScalar::scale(self, r)
    }
}

impl series::Ring for FourierScalar {
    fn one_like(&self) -> Self {
        FourierScalar::constant(self.dim, Rational::one())
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
}
