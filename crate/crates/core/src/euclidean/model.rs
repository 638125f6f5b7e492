use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::poly::{Poly, PolyDoc, Trunc};
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::fourier::SymplecticData;
use crate::invariant::{product_witness, Cube, StructureMapCurve};
use crate::linalg::RatMatrix;

// Polynomials here live in `dim + 1` variables: the coordinates `x_0..x_{dim-1}`
// followed by the formal parameter `t`, truncated above `t^cap`.

fn trunc(dim: usize, cap: usize) -> Trunc {
    Trunc { var: dim, cap: cap as u32 }
}

fn coords(dim: usize) -> Vec<Poly> {
    (0..=dim).map(|i| Poly::var(dim + 1, i)).collect()
}

/// A formal curve of polynomial maps `x ↦ Φ(t, x)` of `ℝ^dim`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalMap {
    dim: usize,
    cap: usize,
    comps: Vec<Poly>,
}

impl FormalMap {
    pub fn identity(dim: usize, cap: usize) -> Self {
        FormalMap { dim, cap, comps: coords(dim)[..dim].to_vec() }
    }

    pub fn new(dim: usize, cap: usize, comps: Vec<Poly>) -> Result<Self> {
        if comps.len() != dim || comps.iter().any(|p| p.nvars() != dim + 1) {
            return Err(Error::shape(format!("a map of ℝ^{dim} needs {dim} polynomials in {} variables", dim + 1)));
        }
        let tr = trunc(dim, cap);
        Ok(FormalMap { dim, cap, comps: comps.iter().map(|p| p.truncate(tr)).collect() })
    }

    /// The affine map `x ↦ Cx + d`, constant in `t`.
    pub fn affine(c: &RatMatrix, d: &[Rational], cap: usize) -> Result<Self> {
        let dim = c.rows();
        if !c.is_square() || d.len() != dim {
            return Err(Error::shape("affine map needs a square matrix and a matching vector"));
        }
        let x = coords(dim);
        let comps = (0..dim)
            .map(|i| {
                let mut p = Poly::constant(dim + 1, d[i].clone());
                for (j, xj) in x.iter().enumerate().take(dim) {
                    p.add_scaled_assign(xj, &c[(i, j)]);
                }
                p
            })
            .collect();
        Ok(FormalMap { dim, cap, comps })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    fn same_shape(&self, dim: usize, cap: usize) -> Result<()> {
        if self.dim != dim || self.cap != cap {
            return Err(Error::CapMismatch { left: self.cap, right: cap });
        }
        Ok(())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &FormalMap) -> Result<Self> {
        self.same_shape(inner.dim, inner.cap)?;
        let tr = trunc(self.dim, self.cap);
        let mut subs = inner.comps.clone();
        subs.push(Poly::var(self.dim + 1, self.dim));
        Ok(FormalMap { dim: self.dim, cap: self.cap, comps: self.comps.iter().map(|p| p.substitute(&subs, Some(tr))).collect() })
    }

    /// `J[i][j] = ∂_j Φ^i`.
    pub fn jacobian(&self) -> Vec<Vec<Poly>> {
        self.comps.iter().map(|p| (0..self.dim).map(|j| p.derivative(j)).collect()).collect()
    }

    /// First `(a, b)` with `(Jᵀ ω J)_{ab} ≠ ω_{ab}`.
    pub fn symplectic_defect(&self, sd: &SymplecticData) -> Option<(usize, usize)> {
        let dim = self.dim;
        let tr = trunc(dim, self.cap);
        let jac = self.jacobian();
        for a in 0..dim {
            for b in 0..dim {
                let mut acc = Poly::constant(dim + 1, -sd.lo(a, b).clone());
                for p in 0..dim {
                    for q in 0..dim {
                        let w = sd.lo(p, q);
                        if !w.is_zero() {
                            acc.add_scaled_assign(&jac[p][a].mul(&jac[q][b], Some(tr)), w);
                        }
                    }
                }
                if !acc.is_zero() {
                    return Some((a, b));
                }
            }
        }
        None
    }

    /// Coefficient of `t^k`.
    pub fn order(&self, k: usize) -> Vec<Poly> {
        self.comps.iter().map(|p| p.coeff_of(self.dim, k as u32)).collect()
    }

    /// Largest total degree in `x` over all components.
    pub fn x_degree(&self) -> u32 {
        self.comps.iter().filter_map(|p| p.degree_in(0..self.dim)).max().unwrap_or(0)
    }

    pub fn to_doc(&self) -> PolyMapDoc {
        PolyMapDoc { dim: self.dim, cap: self.cap, comps: self.comps.iter().map(Poly::to_doc).collect() }
    }

    pub fn from_doc(doc: &PolyMapDoc) -> Result<Self> {
        let comps = doc.comps.iter().map(|p| Poly::from_doc(doc.dim + 1, p)).collect::<Result<Vec<_>>>()?;
        Self::new(doc.dim, doc.cap, comps)
    }
}

/// Exponent vectors list the coordinates first and `t` last.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyMapDoc {
    pub dim: usize,
    pub cap: usize,
    pub comps: Vec<PolyDoc>,
}

/// A formal curve of polynomial vector fields, acting as a derivation in `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyVectorField {
    dim: usize,
    cap: usize,
    comps: Vec<Poly>,
}

impl PolyVectorField {
    pub fn zero(dim: usize, cap: usize) -> Self {
        PolyVectorField { dim, cap, comps: vec![Poly::zero(dim + 1); dim] }
    }

    pub fn new(dim: usize, cap: usize, comps: Vec<Poly>) -> Result<Self> {
        if comps.len() != dim || comps.iter().any(|p| p.nvars() != dim + 1) {
            return Err(Error::shape(format!("a field on ℝ^{dim} needs {dim} polynomials in {} variables", dim + 1)));
        }
        let tr = trunc(dim, cap);
        Ok(PolyVectorField { dim, cap, comps: comps.iter().map(|p| p.truncate(tr)).collect() })
    }

    pub fn constant(v: &[Rational], cap: usize) -> Self {
        let dim = v.len();
        PolyVectorField { dim, cap, comps: v.iter().map(|x| Poly::constant(dim + 1, x.clone())).collect() }
    }

    pub fn basis(dim: usize, cap: usize, a: usize) -> Self {
        let v: Vec<Rational> = (0..dim).map(|i| if i == a { rational::one() } else { rational::zero() }).collect();
        Self::constant(&v, cap)
    }

    /// `x ↦ Σ_k t^k (C_k x + d_k)`, with `c[k-1]`, `d[k-1]` the order-`k` data.
    pub fn affine_curve(c: &[RatMatrix], d: &[Vec<Rational>]) -> Result<Self> {
        if c.len() != d.len() || c.is_empty() {
            return Err(Error::shape("one matrix and one vector per positive order"));
        }
        let dim = c[0].rows();
        let cap = c.len();
        let x = coords(dim);
        let mut comps = vec![Poly::zero(dim + 1); dim];
        for (k, (ck, dk)) in c.iter().zip(d).enumerate() {
            let tk = Poly::monomial(dim + 1, (0..=dim).map(|i| if i == dim { (k + 1) as u32 } else { 0 }).collect(), rational::one());
            for i in 0..dim {
                let mut lin = Poly::constant(dim + 1, dk[i].clone());
                for (j, xj) in x.iter().enumerate().take(dim) {
                    lin.add_scaled_assign(xj, &ck[(i, j)]);
                }
                comps[i] = comps[i].add(&lin.mul(&tk, None));
            }
        }
        Self::new(dim, cap, comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Poly::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        PolyVectorField { dim: self.dim, cap: self.cap, comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-rational::one())
    }

    pub fn scale(&self, r: &Rational) -> Self {
        PolyVectorField { dim: self.dim, cap: self.cap, comps: self.comps.iter().map(|p| p.scale(r)).collect() }
    }

    /// `X(f) = Σ_j X^j ∂_j f`.
    pub fn apply(&self, f: &Poly) -> Poly {
        let tr = trunc(self.dim, self.cap);
        let mut acc = Poly::zero(self.dim + 1);
        for (j, xj) in self.comps.iter().enumerate() {
            if !xj.is_zero() {
                acc = acc.add(&xj.mul(&f.derivative(j), Some(tr)));
            }
        }
        acc
    }

    /// `[X, Y]^i = X(Y^i) − Y(X^i)`.
    pub fn bracket(&self, y: &Self) -> Self {
        let comps = (0..self.dim).map(|i| self.apply(&y.comps[i]).sub(&y.apply(&self.comps[i]))).collect();
        PolyVectorField { dim: self.dim, cap: self.cap, comps }
    }

    /// First `(a, b)` with `∂_a α_b ≠ ∂_b α_a` for `α = ι_X ω`.
    pub fn symplectic_defect(&self, sd: &SymplecticData) -> Option<(usize, usize)> {
        let alpha: Vec<Poly> = (0..self.dim)
            .map(|b| {
                let mut acc = Poly::zero(self.dim + 1);
                for c in 0..self.dim {
                    acc.add_scaled_assign(&self.comps[c], sd.lo(c, b));
                }
                acc
            })
            .collect();
        for a in 0..self.dim {
            for b in a + 1..self.dim {
                if alpha[b].derivative(a) != alpha[a].derivative(b) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    fn has_positive_valuation(&self) -> bool {
        self.comps.iter().all(|p| p.coeff_of(self.dim, 0).is_zero())
    }

    /// `exp(X) f = Σ_j X^j f / j!`, finite because `X = O(t)`.
    pub fn exp_apply(&self, f: &Poly) -> Result<Poly> {
        if !self.has_positive_valuation() {
            return Err(Error::pre("the Lie series needs a field without t⁰ term"));
        }
        let mut acc = f.clone();
        let mut term = f.clone();
        for j in 1..=self.cap + 1 {
            term = self.apply(&term).scale(&rational::rat(1, j as i64));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// `exp(ad X) Y`.
    pub fn exp_ad(&self, y: &Self) -> Result<Self> {
        if !self.has_positive_valuation() {
            return Err(Error::pre("the Lie series needs a field without t⁰ term"));
        }
        let mut acc = y.clone();
        let mut term = y.clone();
        for j in 1..=self.cap + 1 {
            term = self.bracket(&term).scale(&rational::rat(1, j as i64));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// The time-one flow, read off from `exp(X)` on the coordinates.
    pub fn flow_map(&self) -> Result<FormalMap> {
        let x = coords(self.dim);
        let comps = (0..self.dim).map(|i| self.exp_apply(&x[i])).collect::<Result<Vec<_>>>()?;
        Ok(FormalMap { dim: self.dim, cap: self.cap, comps })
    }
}

/// `∇ = ∇⁰ + Γ` on `ℝ^dim` with polynomial Christoffel symbols `Γ^c_{ab}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyConnection {
    dim: usize,
    cap: usize,
    gamma: Vec<Poly>,
}

impl PolyConnection {
    pub fn flat(dim: usize, cap: usize) -> Self {
        PolyConnection { dim, cap, gamma: vec![Poly::zero(dim + 1); dim * dim * dim] }
    }

    /// `∇^{A^t}` with `∇_{e_a} e_b = Σ_k t^k A_k(e_a) e_b`.
    pub fn from_structure_map(b: &StructureMapCurve) -> Self {
        let dim = b.dim();
        let mut out = Self::flat(dim, b.cap());
        for (k, m) in b.endos().iter().enumerate() {
            let mut e = vec![0; dim + 1];
            e[dim] = k as u32;
            for a in 0..dim {
                for bb in 0..dim {
                    for c in 0..dim {
                        let v = &m[a][(c, bb)];
                        if !v.is_zero() {
                            let i = out.index(a, bb, c);
                            out.gamma[i] = out.gamma[i].add(&Poly::monomial(dim + 1, e.clone(), v.clone()));
                        }
                    }
                }
            }
        }
        out
    }

    fn index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * self.dim + b) * self.dim + c
    }

    pub fn gamma(&self, a: usize, b: usize, c: usize) -> &Poly {
        &self.gamma[self.index(a, b, c)]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// `∇_V W = V(W) + Γ(V, W)`.
    pub fn covariant(&self, v: &PolyVectorField, w: &PolyVectorField) -> PolyVectorField {
        let dim = self.dim;
        let tr = trunc(dim, self.cap);
        let comps = (0..dim)
            .map(|c| {
                let mut acc = v.apply(&w.comps[c]);
                for a in 0..dim {
                    for b in 0..dim {
                        let g = self.gamma(a, b, c);
                        if !g.is_zero() && !v.comps[a].is_zero() && !w.comps[b].is_zero() {
                            acc = acc.add(&g.mul(&v.comps[a].mul(&w.comps[b], Some(tr)), Some(tr)));
                        }
                    }
                }
                acc
            })
            .collect();
        PolyVectorField { dim, cap: self.cap, comps }
    }

    /// Lowest `(order, [a, b, c])` with a nonzero `Γ^c_{ab}` coefficient.
    pub fn first_nonzero(&self) -> Option<(usize, [usize; 3])> {
        let mut best: Option<(usize, [usize; 3])> = None;
        for a in 0..self.dim {
            for b in 0..self.dim {
                for c in 0..self.dim {
                    let g = self.gamma(a, b, c);
                    if let Some(k) = (0..=self.cap).find(|&k| !g.coeff_of(self.dim, k as u32).is_zero()) {
                        if best.is_none_or(|(bk, _)| k < bk) {
                            best = Some((k, [a, b, c]));
                        }
                    }
                }
            }
        }
        best
    }
}

/// A formal curve of symplectomorphisms of `(ℝ^dim, Ω)` carried together
/// with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalSymplecto {
    sd: SymplecticData,
    map: FormalMap,
    inv: FormalMap,
}

impl FormalSymplecto {
    pub fn identity(sd: SymplecticData, cap: usize) -> Self {
        let map = FormalMap::identity(sd.dim(), cap);
        FormalSymplecto { sd, inv: map.clone(), map }
    }

    fn checked(sd: SymplecticData, map: FormalMap, inv: FormalMap) -> Result<Self> {
        if let Some((a, b)) = map.symplectic_defect(&sd) {
            return Err(Error::InvalidSymplectic(format!("map does not preserve Ω at ({a}, {b})")));
        }
        let id = FormalMap::identity(sd.dim(), map.cap());
        if map.compose(&inv)? != id || inv.compose(&map)? != id {
            return Err(Error::internal("supplied inverse does not invert the map"));
        }
        Ok(FormalSymplecto { sd, map, inv })
    }

    /// The time-one flow of a symplectic field with no `t⁰` term.
    pub fn from_flow(sd: SymplecticData, x: &PolyVectorField) -> Result<Self> {
        if let Some((a, b)) = x.symplectic_defect(&sd) {
            return Err(Error::InvalidSymplectic(format!("field is not symplectic at ({a}, {b})")));
        }
        let map = x.flow_map()?;
        let inv = x.neg().flow_map()?;
        Self::checked(sd, map, inv)
    }

    /// `x ↦ Cx + d` for `C` preserving `ω`.
    pub fn affine(sd: SymplecticData, c: &RatMatrix, d: &[Rational], cap: usize) -> Result<Self> {
        if !sd.preserves(c) {
            return Err(Error::InvalidSymplectic("linear part does not preserve ω".into()));
        }
        let ci = c.inverse()?;
        let back: Vec<Rational> = ci.mul_vec(d).into_iter().map(|x| -x).collect();
        let map = FormalMap::affine(c, d, cap)?;
        let inv = FormalMap::affine(&ci, &back, cap)?;
        Self::checked(sd, map, inv)
    }

    pub fn sdata(&self) -> &SymplecticData {
        &self.sd
    }

    pub fn map(&self) -> &FormalMap {
        &self.map
    }

    pub fn inverse_map(&self) -> &FormalMap {
        &self.inv
    }

    pub fn cap(&self) -> usize {
        self.map.cap()
    }

    /// Map composition `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        Ok(FormalSymplecto { sd: self.sd.clone(), map: self.map.compose(&other.map)?, inv: other.inv.compose(&self.inv)? })
    }

    pub fn inverse(&self) -> Self {
        FormalSymplecto { sd: self.sd.clone(), map: self.inv.clone(), inv: self.map.clone() }
    }

    fn push_with(map: &FormalMap, inv: &FormalMap, y: &PolyVectorField) -> PolyVectorField {
        let dim = map.dim();
        let tr = trunc(dim, map.cap());
        let jac = map.jacobian();
        let mut subs = inv.comps.clone();
        subs.push(Poly::var(dim + 1, dim));
        let comps = (0..dim)
            .map(|i| {
                let mut z = Poly::zero(dim + 1);
                for j in 0..dim {
                    if !jac[i][j].is_zero() && !y.comps[j].is_zero() {
                        z = z.add(&jac[i][j].mul(&y.comps[j], Some(tr)));
                    }
                }
                z.substitute(&subs, Some(tr))
            })
            .collect();
        PolyVectorField { dim, cap: map.cap(), comps }
    }

    /// Pushforward `(φ·Y)(φ(x)) = Dφ(x) Y(x)`.
    pub fn push_field(&self, y: &PolyVectorField) -> PolyVectorField {
        Self::push_with(&self.map, &self.inv, y)
    }

    /// `(φ·∇)_X Y = φ·(∇_{φ⁻¹·X} φ⁻¹·Y)`, evaluated on the coordinate fields.
    pub fn push_connection(&self, conn: &PolyConnection) -> Result<PolyConnection> {
        let dim = self.sd.dim();
        let cap = self.cap();
        if conn.dim() != dim || conn.cap() != cap {
            return Err(Error::CapMismatch { left: cap, right: conn.cap() });
        }
        let v: Vec<PolyVectorField> =
            (0..dim).map(|a| Self::push_with(&self.inv, &self.map, &PolyVectorField::basis(dim, cap, a))).collect();
        let mut out = PolyConnection::flat(dim, cap);
        for a in 0..dim {
            for b in 0..dim {
                let w = self.push_field(&conn.covariant(&v[a], &v[b]));
                for c in 0..dim {
                    let i = out.index(a, b, c);
                    out.gamma[i] = w.comps[c].clone();
                }
            }
        }
        Ok(out)
    }
}

/// Rejects a cube with `A(e_a) A(e_b) ≠ 0` and returns the pair.
fn nilpotency_witness(sd: &SymplecticData, a: &Cube) -> Result<Option<(usize, usize)>> {
    let m = a.endos(sd);
    for i in 0..sd.dim() {
        for j in 0..sd.dim() {
            if !m[i].mul(&m[j])?.is_zero() {
                return Ok(Some((i, j)));
            }
        }
    }
    Ok(None)
}

fn require_valid_cube(sd: &SymplecticData, a: &Cube) -> Result<()> {
    if let Some((idx, other)) = a.symmetry_witness() {
        return Err(Error::Asymmetric { idx, other });
    }
    if let Some((i, j)) = nilpotency_witness(sd, a)? {
        return Err(Error::pre(format!("A(e_{i}) A(e_{j}) ≠ 0")));
    }
    Ok(())
}

/// `x ↦ x − ½ A(x)x` with inverse `ψ^{−A}`, constant in `t`.
pub fn psi_a(sd: &SymplecticData, a: &Cube, cap: usize) -> Result<FormalSymplecto> {
    require_valid_cube(sd, a)?;
    let build = |sign: i64| -> Result<FormalMap> {
        let dim = sd.dim();
        let x = coords(dim);
        let m = a.endos(sd);
        let half = rational::rat(-sign, 2);
        let comps = (0..dim)
            .map(|c| {
                let mut p = x[c].clone();
                for (aa, ma) in m.iter().enumerate() {
                    for b in 0..dim {
                        let v = &ma[(c, b)];
                        if !v.is_zero() {
                            p.add_scaled_assign(&x[aa].mul(&x[b], None), &(v * &half));
                        }
                    }
                }
                p
            })
            .collect();
        FormalMap::new(dim, cap, comps)
    };
    FormalSymplecto::checked(sd.clone(), build(1)?, build(-1)?)
}

/// Identities satisfied by `ψ^A` on the coordinate fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiReport {
    pub symplectic: bool,
    pub pushforward_formula: bool,
    pub carries_flat_to_target: bool,
}

impl PsiReport {
    pub fn passed(&self) -> bool {
        self.symplectic && self.pushforward_formula && self.carries_flat_to_target
    }
}

/// `ψ·X = X − A(·)X` for constant `X`, where `A(x)` uses every order.
fn pushforward_formula_holds(psi: &FormalSymplecto, target: &PolyConnection) -> bool {
    let dim = psi.sd.dim();
    let cap = psi.cap();
    let x = coords(dim);
    (0..dim).all(|b| {
        let pushed = psi.push_field(&PolyVectorField::basis(dim, cap, b));
        (0..dim).all(|c| {
            let mut expected = if b == c { Poly::one(dim + 1) } else { Poly::zero(dim + 1) };
            for (a, xa) in x.iter().enumerate().take(dim) {
                expected = expected.sub(&target.gamma(a, b, c).mul(xa, None));
            }
            pushed.comps[c] == expected
        })
    })
}

fn report(psi: &FormalSymplecto, target: &PolyConnection) -> Result<PsiReport> {
    let flat = PolyConnection::flat(psi.sd.dim(), psi.cap());
    Ok(PsiReport {
        symplectic: psi.map.symplectic_defect(&psi.sd).is_none(),
        pushforward_formula: pushforward_formula_holds(psi, target),
        carries_flat_to_target: &psi.push_connection(&flat)? == target,
    })
}

/// Checks `ψ^A` against `∇^A`.
pub fn verify_psi_a(sd: &SymplecticData, a: &Cube, psi: &FormalSymplecto) -> Result<PsiReport> {
    let curve = StructureMapCurve::new(sd.clone(), {
        let mut cubes = vec![a.clone()];
        cubes.resize(psi.cap() + 1, Cube::zeros(sd.dim()));
        cubes
    })?;
    report(psi, &PolyConnection::from_structure_map(&curve))
}

/// Requires symmetric cubes, no order-0 term and `A^t(X) A^t(Y) = 0`.
pub fn require_valid_curve(a: &StructureMapCurve) -> Result<()> {
    if !a.cube(0).is_zero() {
        return Err(Error::pre("the curve must start at the trivial connection"));
    }
    if let Some((k, x, y)) = product_witness(a) {
        return Err(Error::pre(format!("A^t(e_{x}) A^t(e_{y}) ≠ 0 at order {k}")));
    }
    Ok(())
}

/// `(X_{A^t})_x = −½ A^t(x)x`.
pub fn generator_field(a: &StructureMapCurve) -> PolyVectorField {
    let conn = PolyConnection::from_structure_map(a);
    let dim = a.dim();
    let x = coords(dim);
    let half = rational::rat(-1, 2);
    let comps = (0..dim)
        .map(|c| {
            let mut p = Poly::zero(dim + 1);
            for aa in 0..dim {
                for b in 0..dim {
                    let g = conn.gamma(aa, b, c);
                    if !g.is_zero() {
                        p.add_scaled_assign(&g.mul(&x[aa].mul(&x[b], None), None), &half);
                    }
                }
            }
            p
        })
        .collect();
    PolyVectorField { dim, cap: a.cap(), comps }
}

/// `ψ_{A^t} = exp X_{A^t}` as a formal map, with inverse `ψ_{−A^t}`.
pub fn psi_at(a: &StructureMapCurve) -> Result<FormalSymplecto> {
    require_valid_curve(a)?;
    FormalSymplecto::from_flow(a.sdata().clone(), &generator_field(a))
}

/// `psi_at` identities plus `ad X_{A^t} Y = A^t(·)Y` and
/// `(ad X_{A^t})² Y = 0` on constant fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlowReport {
    pub psi: PsiReport,
    pub ad_formula: bool,
    pub ad_square_zero: bool,
}

impl FlowReport {
    pub fn passed(&self) -> bool {
        self.psi.passed() && self.ad_formula && self.ad_square_zero
    }
}

pub fn verify_psi_at(a: &StructureMapCurve, psi: &FormalSymplecto) -> Result<FlowReport> {
    let target = PolyConnection::from_structure_map(a);
    let x_gen = generator_field(a);
    let dim = a.dim();
    let cap = a.cap();
    let x = coords(dim);
    let mut ad_formula = true;
    let mut ad_square_zero = true;
    for b in 0..dim {
        let y = PolyVectorField::basis(dim, cap, b);
        let ad = x_gen.bracket(&y);
        let expected: Vec<Poly> = (0..dim)
            .map(|c| {
                let mut p = Poly::zero(dim + 1);
                for (aa, xa) in x.iter().enumerate().take(dim) {
                    p = p.add(&target.gamma(aa, b, c).mul(xa, None));
                }
                p
            })
            .collect();
        ad_formula &= ad.comps == expected;
        ad_square_zero &= x_gen.bracket(&ad).is_zero();
    }
    Ok(FlowReport { psi: report(psi, &target)?, ad_formula, ad_square_zero })
}

/// `ψ = ψ_{B^t} ∘ ψ_{−A^t}`, verified to carry `∇^{A^t}` to `∇^{B^t}`.
pub fn equivalence_rn(a: &StructureMapCurve, b: &StructureMapCurve) -> Result<FormalSymplecto> {
    if a.sdata() != b.sdata() || a.cap() != b.cap() {
        return Err(Error::pre("both curves need the same ω and cap"));
    }
    let psi = psi_at(b)?.compose(&psi_at(a)?.inverse())?;
    let moved = psi.push_connection(&PolyConnection::from_structure_map(a))?;
    if moved != PolyConnection::from_structure_map(b) {
        return Err(Error::internal("composed flow does not carry ∇^A to ∇^B"));
    }
    Ok(psi)
}

/// `ψ = exp(X_t) ∘ σ` with `σ(x) = Cx + d` and `X_t = C_t x + d_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineNormalForm {
    pub c: RatMatrix,
    pub d: Vec<Rational>,
    /// Orders `1..=cap`.
    pub c_t: Vec<RatMatrix>,
    pub d_t: Vec<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StabilizerVerdict {
    Fixes(AffineNormalForm),
    Moves { order: usize, idx: [usize; 3] },
}

/// Truncated matrix-series product.
fn series_mul(x: &[RatMatrix], y: &[RatMatrix]) -> Result<Vec<RatMatrix>> {
    let n = x[0].rows();
    let mut out = vec![RatMatrix::zeros(n, n); x.len()];
    for (p, xp) in x.iter().enumerate() {
        if xp.is_zero() {
            continue;
        }
        for (q, yq) in y.iter().enumerate().take(x.len() - p) {
            if !yq.is_zero() {
                out[p + q] = out[p + q].add(&xp.mul(yq)?);
            }
        }
    }
    Ok(out)
}

/// Decides whether `ψ` fixes `∇⁰` through the cap and, if so, extracts the
/// affine normal form.
pub fn stabilizer_check(psi: &FormalSymplecto) -> Result<StabilizerVerdict> {
    let sd = psi.sdata();
    let dim = sd.dim();
    let cap = psi.cap();
    let moved = psi.push_connection(&PolyConnection::flat(dim, cap))?;
    if let Some((order, idx)) = moved.first_nonzero() {
        return Ok(StabilizerVerdict::Moves { order, idx });
    }
    let sigma = psi.map.order(0);
    if sigma.iter().any(|p| p.degree().unwrap_or(0) > 1) {
        return Err(Error::internal("order-0 part of a stabilizing map is not affine"));
    }
    let c = RatMatrix::from_fn(dim, dim, |i, j| {
        let mut e = vec![0; dim + 1];
        e[j] = 1;
        sigma[i].coeff(&e)
    });
    let d: Vec<Rational> = sigma.iter().map(Poly::constant_term).collect();
    let sigma_map = FormalSymplecto::affine(sd.clone(), &c, &d, cap)?;
    let g = psi.map.compose(&sigma_map.inv)?;
    if g.x_degree() > 1 {
        return Err(Error::internal("stabilizing map is not affine at positive order"));
    }
    if g.order(0) != FormalMap::identity(dim, cap).order(0) {
        return Err(Error::internal("exp(X_t) must start at the identity"));
    }
    // N_k = [[M_k, v_k], [0, 0]] for k ≥ 1; log(I + N) = [[C_t, d_t], [0, 0]].
    let n = dim + 1;
    let aug: Vec<RatMatrix> = (0..=cap)
        .map(|k| {
            if k == 0 {
                return RatMatrix::zeros(n, n);
            }
            let gk = g.order(k);
            RatMatrix::from_fn(n, n, |i, j| {
                if i == dim {
                    return rational::zero();
                }
                let mut e = vec![0; dim + 1];
                if j < dim {
                    e[j] = 1;
                }
                gk[i].coeff(&e)
            })
        })
        .collect();
    let mut log = vec![RatMatrix::zeros(n, n); cap + 1];
    let mut power = aug.clone();
    for j in 1..=cap {
        let coef = rational::rat(if j % 2 == 1 { 1 } else { -1 }, j as i64);
        for k in 0..=cap {
            log[k] = log[k].add(&power[k].scale(&coef));
        }
        power = series_mul(&power, &aug)?;
    }
    let c_t: Vec<RatMatrix> = (1..=cap).map(|k| RatMatrix::from_fn(dim, dim, |i, j| log[k][(i, j)].clone())).collect();
    let d_t: Vec<Vec<Rational>> = (1..=cap).map(|k| (0..dim).map(|i| log[k][(i, dim)].clone()).collect()).collect();
    for (k, ck) in c_t.iter().enumerate() {
        let lhs = ck.transpose().mul(sd.lo_matrix())?.add(&sd.lo_matrix().mul(ck)?);
        if !lhs.is_zero() {
            return Err(Error::internal(format!("C_t at order {} is not in sp(ω)", k + 1)));
        }
    }
    if cap > 0 {
        let flow = FormalSymplecto::from_flow(sd.clone(), &PolyVectorField::affine_curve(&c_t, &d_t)?)?;
        if flow.map.compose(&sigma_map.map)? != psi.map {
            return Err(Error::internal("affine normal form does not reproduce the map"));
        }
    }
    Ok(StabilizerVerdict::Fixes(AffineNormalForm { c, d, c_t, d_t }))
}
