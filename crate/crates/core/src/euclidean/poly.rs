use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};

/// Optional truncation: drop every term whose exponent in variable `var`
/// exceeds `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Trunc {
    pub var: usize,
    pub cap: u32,
}

/// Sparse polynomial with rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl std::fmt::Debug for Poly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("{}*x^{:?}", c, e)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, rational::one())
    }

    pub fn monomial(nvars: usize, exps: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exps.len(), nvars, "exponent length");
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(rational::zero)
    }

    /// Total degree over the listed variables; `None` for the zero polynomial.
    pub fn degree_in(&self, vars: std::ops::Range<usize>) -> Option<u32> {
        self.terms.keys().map(|e| e[vars.clone()].iter().sum()).max()
    }

    pub fn degree(&self) -> Option<u32> {
        self.degree_in(0..self.nvars)
    }

    fn push(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.nvars, o.nvars, "polynomial variable count mismatch");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.push(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * r)).collect() }
    }

    pub fn add_scaled_assign(&mut self, o: &Self, r: &Rational) {
        self.check(o);
        for (e, c) in &o.terms {
            self.push(e.clone(), c * r);
        }
    }

    pub fn mul(&self, o: &Self, trunc: Option<Trunc>) -> Self {
        self.check(o);
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                if let Some(t) = trunc {
                    if e1[t.var] + e2[t.var] > t.cap {
                        continue;
                    }
                }
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.push(e, c1 * c2);
            }
        }
        out
    }

    pub fn truncate(&self, trunc: Trunc) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| e[trunc.var] <= trunc.cap).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.push(e2, c * Rational::from_integer(e[i].into()));
        }
        out
    }

    /// Coefficient of `var^k`, as a polynomial with that variable removed
    /// (its exponent set to zero).
    pub fn coeff_of(&self, var: usize, k: u32) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == k {
                let mut e2 = e.clone();
                e2[var] = 0;
                out.push(e2, c.clone());
            }
        }
        out
    }

    /// Replaces every variable `i` by `subs[i]`.
    pub fn substitute(&self, subs: &[Poly], trunc: Option<Trunc>) -> Self {
        assert_eq!(subs.len(), self.nvars, "one substitute per variable");
        let nv = subs.first().map_or(self.nvars, |s| s.nvars);
        let mut powers: Vec<Vec<Poly>> = subs.iter().map(|s| vec![Poly::one(s.nvars)]).collect();
        let mut out = Poly::zero(nv);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().expect("nonempty").mul(&subs[i], trunc);
                    powers[i].push(next);
                }
                term = term.mul(&powers[i][k as usize], trunc);
                if term.is_zero() {
                    break;
                }
            }
            for (e, c) in term.terms {
                out.push(e, c);
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        let mut acc = rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    m *= x;
                }
            }
            acc += m;
        }
        acc
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn to_doc(&self) -> PolyDoc {
        PolyDoc(self.terms.iter().map(|(e, c)| (e.clone(), rational::to_string(c))).collect())
    }

    pub fn from_doc(nvars: usize, doc: &PolyDoc) -> Result<Self> {
        let mut p = Self::zero(nvars);
        for (e, c) in &doc.0 {
            if e.len() != nvars {
                return Err(Error::parse(format!("exponent vector {e:?} should have {nvars} entries")));
            }
            p.push(e.clone(), rational::parse(c)?);
        }
        Ok(p)
    }
}

/// List of `(exponents, coefficient)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolyDoc(pub Vec<(Vec<u32>, String)>);
