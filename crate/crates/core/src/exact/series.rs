//! Truncated power series in the deformation parameter `t`.
//!
//! A [`Series`] carries its cap `K` and holds exactly `K + 1` coefficients.
//! Every binary operation checks that the caps agree; nothing is re-capped
//! implicitly. Coefficients only need to implement [`Coeff`] (a module over ℚ)
//! for additive operations and [`Ring`] for products and exponentials. Products
//! of coefficients of *different* types (a connection acting on a vector field,
//! say) go through [`Series::cauchy`] with an explicit bilinear closure.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::gaussian::Gaussian;
use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Additive structure plus scaling by rationals.
///
/// `zero_like` exists because some coefficient types (tensor fields) carry a
/// shape that a bare `zero()` could not know.
pub trait Coeff: Clone + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;

    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
}

/// Associative multiplication with a unit.
pub trait Ring: Coeff {
    fn one_like(&self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn neg_ref(&self) -> Self {
        -self.clone()
    }
    fn scale(&self, r: &Rational) -> Self {
        self * r
    }
}

impl Ring for Rational {
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for Gaussian {
    fn zero_like(&self) -> Self {
        Gaussian::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Rational) -> Self {
        Gaussian::scale(self, r)
    }
}

impl Ring for Gaussian {
    fn one_like(&self) -> Self {
        Gaussian::one()
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Series<C> {
    cap: usize,
    coeffs: Vec<C>,
}

impl<C> Series<C> {
    /// Builds a series from exactly `cap + 1` coefficients.
    pub fn from_coeffs(cap: usize, coeffs: Vec<C>) -> Result<Self> {
        if coeffs.len() != cap + 1 {
            return Err(Error::shape(format!(
                "series with cap {cap} needs {} coefficients, got {}",
                cap + 1,
                coeffs.len()
            )));
        }
        Ok(Series { cap, coeffs })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coeff(&self, k: usize) -> &C {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn map<D>(&self, f: impl FnMut(&C) -> D) -> Series<D> {
        Series { cap: self.cap, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_map<D>(&self, f: impl FnMut(&C) -> Result<D>) -> Result<Series<D>> {
        Ok(Series { cap: self.cap, coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn check_cap<D>(&self, other: &Series<D>) -> Result<()> {
        if self.cap != other.cap {
            return Err(Error::CapMismatch { left: self.cap, right: other.cap });
        }
        Ok(())
    }

    pub fn zip_with<D, E>(&self, other: &Series<D>, mut f: impl FnMut(&C, &D) -> E) -> Result<Series<E>> {
        self.check_cap(other)?;
        Ok(Series {
            cap: self.cap,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(a, b)).collect(),
        })
    }
}

impl<C: Clone> Series<C> {
    /// Keeps orders `0..=cap`; `cap` may not exceed the current one.
    pub fn truncate(&self, cap: usize) -> Result<Self> {
        if cap > self.cap {
            return Err(Error::pre(format!("cannot extend series from cap {} to {cap}", self.cap)));
        }
        Ok(Series { cap, coeffs: self.coeffs[..=cap].to_vec() })
    }
}

impl<C: Coeff> Series<C> {
    /// The series `c·t^0`, with zeros (shaped like `c`) elsewhere.
    pub fn constant(cap: usize, c: C) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; cap + 1];
        coeffs[0] = c;
        Series { cap, coeffs }
    }

    /// The series `c·t^k`.
    pub fn monomial(cap: usize, k: usize, c: C) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; cap + 1];
        if k <= cap {
            coeffs[k] = c;
        }
        Series { cap, coeffs }
    }

    pub fn zero_like(&self) -> Self {
        self.map(Coeff::zero_like)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Coeff::is_zero)
    }

    /// Smallest `k` with a nonzero coefficient, if any.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.add_ref(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a.sub_ref(b))
    }

    pub fn neg(&self) -> Self {
        self.map(Coeff::neg_ref)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        self.map(|c| c.scale(r))
    }

    /// Substitutes `t ↦ a·t`: coefficient `k` is multiplied by `a^k`.
    pub fn rescale_parameter(&self, a: &Rational) -> Self {
        let mut pow = rational::one();
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            coeffs.push(c.scale(&pow));
            pow *= a;
        }
        Series { cap: self.cap, coeffs }
    }

    /// Cauchy product with an arbitrary bilinear map, truncated at the cap.
    /// `zero` is the additive identity of the output coefficient type.
    pub fn cauchy<D, E>(&self, other: &Series<D>, zero: &E, f: impl Fn(&C, &D) -> E) -> Result<Series<E>>
    where
        D: Coeff,
        E: Coeff,
    {
        self.check_cap(other)?;
        let cap = self.cap;
        let mut out = Vec::with_capacity(cap + 1);
        for k in 0..=cap {
            let mut acc = zero.clone();
            for p in 0..=k {
                let a = &self.coeffs[p];
                let b = &other.coeffs[k - p];
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.add_ref(&f(a, b));
            }
            out.push(acc);
        }
        Ok(Series { cap, coeffs: out })
    }
}

impl<C: Ring> Series<C> {
    pub fn one_like(&self) -> Self {
        Series::constant(self.cap, self.coeffs[0].one_like())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let zero = self.coeffs[0].zero_like();
        self.cauchy(other, &zero, |a, b| a.mul_ref(b))
    }

    /// `Σ_{j=0..K} x^j / j!`, which is exact because `x` has no constant term.
    pub fn exp_positive_valuation(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(Error::pre("exp needs a series with zero constant term"));
        }
        let mut term = self.one_like();
        let mut sum = term.clone();
        for j in 1..=self.cap {
            term = term.mul(self)?.scale(&rational::rat(1, j as i64));
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term)?;
        }
        Ok(sum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat};
    use proptest::prelude::*;

    fn s(cap: usize, c: &[i64]) -> Series<Rational> {
        Series::from_coeffs(cap, c.iter().map(|&x| int(x)).collect()).unwrap()
    }

    /// Plain polynomial multiplication, then truncation: the independent route.
    fn poly_mul_truncate(a: &[i64], b: &[i64], cap: usize) -> Vec<i64> {
        let mut out = vec![0i64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out.truncate(cap + 1);
        out.resize(cap + 1, 0);
        out
    }

    #[test]
    fn truncation_rule() {
        let a = s(1, &[1, 1]);
        let b = s(1, &[1, -1]);
        assert_eq!(a.mul(&b).unwrap(), s(1, &[1, 0]));
    }

    #[test]
    fn annihilator() {
        let a = s(3, &[2, -1, 5, 7]);
        assert!(a.mul(&a.zero_like()).unwrap().is_zero());
    }

    #[test]
    fn hand_expansion() {
        let a = s(2, &[1, 1, 1]);
        let b = s(2, &[1, 1, 0]);
        assert_eq!(poly_mul_truncate(&[1, 1, 1], &[1, 1], 2), vec![1, 2, 2]);
        assert_eq!(a.mul(&b).unwrap(), s(2, &[1, 2, 2]));
    }

    #[test]
    fn cap_mismatch_is_an_error() {
        let a = s(1, &[1, 1]);
        let b = s(2, &[1, 1, 0]);
        assert_eq!(a.add(&b), Err(Error::CapMismatch { left: 1, right: 2 }));
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn exp_definition() {
        assert_eq!(s(3, &[0, 0, 0, 0]).exp_positive_valuation().unwrap(), s(3, &[1, 0, 0, 0]));
        let c = rat(3, 2);
        let x = Series::monomial(2, 1, c.clone());
        let e = x.exp_positive_valuation().unwrap();
        let expected = Series::from_coeffs(2, vec![int(1), c.clone(), &c * &c / int(2)]).unwrap();
        assert_eq!(e, expected);
        assert!(s(2, &[1, 0, 0]).exp_positive_valuation().is_err());
    }

    #[test]
    fn exp_of_gaussian_series() {
        let x = Series::from_coeffs(
            3,
            vec![Gaussian::zero(), Gaussian::i(), Gaussian::real(rat(1, 3)), Gaussian::zero()],
        )
        .unwrap();
        let e = x.exp_positive_valuation().unwrap();
        let back = x.neg().exp_positive_valuation().unwrap();
        assert_eq!(e.mul(&back).unwrap(), e.one_like());
    }

    fn arb_series(cap: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
        proptest::collection::vec((-20i64..20, 1i64..9), cap + 1)
    }

    fn build(cap: usize, v: &[(i64, i64)]) -> Series<Rational> {
        Series::from_coeffs(cap, v.iter().map(|&(n, d)| rat(n, d)).collect()).unwrap()
    }

    proptest! {
        #[test]
        fn exp_inverse_law(v in arb_series(4)) {
            let mut x = build(4, &v);
            x.coeffs[0] = int(0);
            let lhs = x.exp_positive_valuation().unwrap().mul(&x.neg().exp_positive_valuation().unwrap()).unwrap();
            prop_assert_eq!(lhs, x.one_like());
        }

        #[test]
        fn truncation_consistency(a in arb_series(4), b in arb_series(4), k in 0usize..4) {
            let (a, b) = (build(4, &a), build(4, &b));
            let full = a.mul(&b).unwrap().truncate(k).unwrap();
            let short = a.truncate(k).unwrap().mul(&b.truncate(k).unwrap()).unwrap();
            prop_assert_eq!(full, short);
        }

        #[test]
        fn ring_axioms(a in arb_series(3), b in arb_series(3), c in arb_series(3)) {
            let (a, b, c) = (build(3, &a), build(3, &b), build(3, &c));
            prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
            prop_assert_eq!(
                a.mul(&b.add(&c).unwrap()).unwrap(),
                a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn gaussian_ring_axioms(v in proptest::collection::vec((-9i64..9, 1i64..5), 6)) {
            let g = |i: usize| Gaussian::new(rat(v[2 * i].0, v[2 * i].1), rat(v[2 * i + 1].0, v[2 * i + 1].1));
            let (a, b, c) = (g(0), g(1), g(2));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        }
    }
}
