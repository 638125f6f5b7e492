use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::series;
use crate::fourier::{FourierScalar, ModeEntry, SymplecticData};

/// A vector field `Σ_c X^c ∂_c` on the torus with Fourier components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FourierVectorField {
    comps: Vec<FourierScalar>,
}

impl FourierVectorField {
    pub fn zero(dim: usize) -> Self {
        FourierVectorField { comps: vec![FourierScalar::zero(dim); dim] }
    }

    pub fn new(comps: Vec<FourierScalar>) -> Result<Self> {
        let dim = comps.len();
        if comps.iter().any(|c| c.dim() != dim) {
            return Err(Error::shape(format!("a vector field in dimension {dim} needs {dim} components")));
        }
        Ok(FourierVectorField { comps })
    }

    /// The constant field with coordinates `v`.
    pub fn constant(v: &[Rational]) -> Self {
        let dim = v.len();
        FourierVectorField { comps: v.iter().map(|x| FourierScalar::constant(dim, x.clone())).collect() }
    }

    /// The Hamiltonian field of `f`, fixed by `i(X_f)ω = df`:
    /// `X_f^e = Σ_c ω^{ce} ∂_c f`.
    pub fn hamiltonian(sd: &SymplecticData, f: &FourierScalar) -> Result<Self> {
        let dim = sd.dim();
        if f.dim() != dim {
            return Err(Error::shape("Hamiltonian in the wrong dimension"));
        }
        let grads = (0..dim).map(|c| f.derivative(c)).collect::<Result<Vec<_>>>()?;
        let comps = (0..dim)
            .map(|e| {
                let mut acc = FourierScalar::zero(dim);
                for (c, g) in grads.iter().enumerate() {
                    acc.add_scaled_assign(g, sd.hi(c, e));
                }
                acc
            })
            .collect();
        Ok(FourierVectorField { comps })
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, c: usize) -> &FourierScalar {
        &self.comps[c]
    }

    pub fn comps(&self) -> &[FourierScalar] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(FourierScalar::is_empty)
    }

    pub fn validate_reality(&self) -> Result<()> {
        self.comps.iter().try_for_each(FourierScalar::validate_reality)
    }

    pub fn add(&self, o: &Self) -> Self {
        FourierVectorField { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        FourierVectorField { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn neg(&self) -> Self {
        FourierVectorField { comps: self.comps.iter().map(FourierScalar::neg).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FourierVectorField { comps: self.comps.iter().map(|c| c.scale(r)).collect() }
    }

    pub fn add_assign(&mut self, o: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&o.comps) {
            a.add_assign(b);
        }
    }

    /// `X(g) = Σ_i X^i ∂_i g`.
    pub fn apply(&self, g: &FourierScalar) -> FourierScalar {
        let mut acc = FourierScalar::zero(self.dim());
        self.apply_into(g, &mut acc, &rational::one());
        acc
    }

    /// `acc += r·X(g)`.
    pub fn apply_into(&self, g: &FourierScalar, acc: &mut FourierScalar, r: &Rational) {
        for (i, xi) in self.comps.iter().enumerate() {
            if xi.is_empty() {
                continue;
            }
            let dg = g.derivative(i).expect("index in range");
            acc.add_product_assign(xi, &dg, r);
        }
    }

    /// `[X, Y]^c = X(Y^c) − Y(X^c)`.
    pub fn bracket(&self, y: &Self) -> Self {
        let mut out = Self::zero(self.dim());
        self.bracket_into(y, &mut out, &rational::one());
        out
    }

    /// `acc += r·[X, Y]`.
    pub fn bracket_into(&self, y: &Self, acc: &mut Self, r: &Rational) {
        let minus = -r;
        for c in 0..self.dim() {
            self.apply_into(&y.comps[c], &mut acc.comps[c], r);
            y.apply_into(&self.comps[c], &mut acc.comps[c], &minus);
        }
    }

    /// The 1-form `α_b = Σ_a X^a ω_{ab}`, i.e. `i(X)ω`.
    pub fn contract_omega(&self, sd: &SymplecticData) -> Vec<FourierScalar> {
        let dim = self.dim();
        (0..dim)
            .map(|b| {
                let mut acc = FourierScalar::zero(dim);
                for (a, xa) in self.comps.iter().enumerate() {
                    acc.add_scaled_assign(xa, sd.lo(a, b));
                }
                acc
            })
            .collect()
    }

    /// Whether `d(i(X)ω) = 0`; returns the first failing pair `(a, b)`.
    pub fn symplectic_defect(&self, sd: &SymplecticData) -> Option<(usize, usize)> {
        let alpha = self.contract_omega(sd);
        let dim = self.dim();
        for a in 0..dim {
            for b in a + 1..dim {
                let lhs = alpha[b].derivative(a).expect("in range");
                let rhs = alpha[a].derivative(b).expect("in range");
                if lhs != rhs {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_symplectic(&self, sd: &SymplecticData) -> bool {
        self.symplectic_defect(sd).is_none()
    }

    /// The zero-mode (harmonic) part.
    pub fn constant_part(&self) -> Vec<Rational> {
        self.comps.iter().map(FourierScalar::mean).collect()
    }

    /// Pushforward under the affine operator `σ*`:
    /// `(σ*·Y)^j(x) = Σ_i (C⁻¹)_{ji} Y^i(Cx + 2πτ)`.
    pub fn pull_affine(&self, c: &[Vec<i64>], c_inv: &[Vec<i64>], tau: &[Rational]) -> Result<Self> {
        let dim = self.dim();
        let moved = self.comps.iter().map(|y| y.compose_affine(c, tau)).collect::<Result<Vec<_>>>()?;
        let comps = (0..dim)
            .map(|j| {
                let mut acc = FourierScalar::zero(dim);
                for (i, y) in moved.iter().enumerate() {
                    if c_inv[j][i] != 0 {
                        acc.add_scaled_assign(y, &rational::int(c_inv[j][i]));
                    }
                }
                acc
            })
            .collect();
        Ok(FourierVectorField { comps })
    }

    pub fn to_doc(&self) -> Vec<Vec<ModeEntry>> {
        self.comps.iter().map(FourierScalar::to_entries).collect()
    }

    pub fn from_doc(dim: usize, doc: &[Vec<ModeEntry>]) -> Result<Self> {
        if doc.len() != dim {
            return Err(Error::parse(format!("vector field with {} components in dimension {dim}", doc.len())));
        }
        Self::new(doc.iter().map(|e| FourierScalar::from_entries(dim, e)).collect::<Result<Vec<_>>>()?)
    }
}

impl series::Coeff for FourierVectorField {
    fn zero_like(&self) -> Self {
        Self::zero(self.dim())
    }
    fn is_zero(&self) -> bool {
        FourierVectorField::is_zero(self)
    }
    fn add_ref(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn scale(&self, r: &Rational) -> Self {
        FourierVectorField::scale(self, r)
    }
}

/// Serialized vector field: one mode list per component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VectorFieldDoc(pub Vec<Vec<ModeEntry>>);
