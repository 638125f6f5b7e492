use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::lie::{self, FieldCurve, ScalarCurve};
use super::vector_field::{FourierVectorField, VectorFieldDoc};
use crate::curvature::ConnectionCurve;
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::Series;
use crate::exec;
use crate::fourier::{FourierScalar, OmegaDoc, SymplecticData, TensorField};
use crate::linalg::RatMatrix;

/// A formal curve of torus symplectomorphisms `ψ_t = σ* ∘ exp X_t`, acting
/// on functions as an operator. Here `σ(x) = Cx + 2πd` with `C` integral and
/// symplectic and `d` taken modulo 1; `X_t` has no order-0 term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplectoCurve {
    sd: SymplecticData,
    c: Vec<Vec<i64>>,
    c_inv: Vec<Vec<i64>>,
    d: Vec<Rational>,
    x: FieldCurve,
}

/// `ψ_f(t^k)`: the time-`t^k` flow of the Hamiltonian field of `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HamiltonianSpec {
    pub f: FourierScalar,
    pub order: usize,
}

fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

fn identity_rows(dim: usize) -> Vec<Vec<i64>> {
    (0..dim).map(|i| (0..dim).map(|j| (i == j) as i64).collect()).collect()
}

fn int_matrix(m: &RatMatrix) -> Result<Vec<Vec<i64>>> {
    m.to_i64_rows().ok_or_else(|| Error::NotLatticeSymplectic("entries exceed 64-bit integers".into()))
}

fn mul_rows(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn mul_vec(a: &[Vec<i64>], v: &[Rational]) -> Vec<Rational> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| y * rational::int(*x)).sum()).collect()
}

impl SymplectoCurve {
    pub fn identity(sd: SymplecticData, cap: usize) -> Self {
        let dim = sd.dim();
        SymplectoCurve {
            c: identity_rows(dim),
            c_inv: identity_rows(dim),
            d: vec![Rational::zero(); dim],
            x: Series::constant(cap, FourierVectorField::zero(dim)),
            sd,
        }
    }

    /// Validates and assembles `σ* ∘ exp X_t`; `x` lists orders `1..=cap`.
    pub fn new(sd: SymplecticData, c: &RatMatrix, d: Vec<Rational>, x: Vec<FourierVectorField>) -> Result<Self> {
        let dim = sd.dim();
        if c.rows() != dim || c.cols() != dim || d.len() != dim {
            return Err(Error::shape("affine part has the wrong size"));
        }
        if !c.is_integral() {
            return Err(Error::NotLatticeSymplectic("linear part has non-integer entries".into()));
        }
        if !sd.preserves(c) {
            return Err(Error::NotLatticeSymplectic("linear part does not preserve omega".into()));
        }
        let c_inv = c.inverse()?;
        if !c_inv.is_integral() {
            return Err(Error::NotLatticeSymplectic("inverse of the linear part is not integral".into()));
        }
        for di in &d {
            if !(di * rational::int(4)).is_integer() {
                return Err(Error::NonRepresentablePhase(format!(
                    "translation entry {} is not a multiple of 1/4",
                    rational::to_string(di)
                )));
            }
        }
        let cap = x.len();
        let mut orders = Vec::with_capacity(cap + 1);
        orders.push(FourierVectorField::zero(dim));
        for (k, xk) in x.into_iter().enumerate() {
            if xk.dim() != dim {
                return Err(Error::shape(format!("order {} generator in the wrong dimension", k + 1)));
            }
            xk.validate_reality()?;
            if let Some((a, b)) = xk.symplectic_defect(&sd) {
                return Err(Error::pre(format!(
                    "order {} generator is not symplectic: d(i(X)ω) has a nonzero ({a}, {b}) component",
                    k + 1
                )));
            }
            orders.push(xk);
        }
        Ok(SymplectoCurve {
            c: int_matrix(c)?,
            c_inv: int_matrix(&c_inv)?,
            d: d.iter().map(frac).collect(),
            x: Series::from_coeffs(cap, orders)?,
            sd,
        })
    }

    pub fn affine(sd: SymplecticData, cap: usize, c: &RatMatrix, d: Vec<Rational>) -> Result<Self> {
        let dim = sd.dim();
        Self::new(sd, c, d, vec![FourierVectorField::zero(dim); cap])
    }

    /// `exp X_t` with identity affine part.
    pub fn flow(sd: SymplecticData, x: Vec<FourierVectorField>) -> Result<Self> {
        let dim = sd.dim();
        Self::new(sd, &RatMatrix::identity(dim), vec![Rational::zero(); dim], x)
    }

    /// `ψ_f(a·t^k) = exp(a t^k X_f)`.
    pub fn hamiltonian(sd: SymplecticData, cap: usize, spec: &HamiltonianSpec, a: &Rational) -> Result<Self> {
        if spec.order == 0 || spec.order > cap {
            return Err(Error::pre(format!("Hamiltonian order {} outside 1..={cap}", spec.order)));
        }
        let dim = sd.dim();
        let mut x = vec![FourierVectorField::zero(dim); cap];
        x[spec.order - 1] = FourierVectorField::hamiltonian(&sd, &spec.f)?.scale(a);
        Self::flow(sd, x)
    }

    fn from_parts(sd: SymplecticData, c: Vec<Vec<i64>>, c_inv: Vec<Vec<i64>>, d: Vec<Rational>, x: FieldCurve) -> Result<Self> {
        for k in 1..=x.cap() {
            if let Some((a, b)) = x.coeff(k).symplectic_defect(&sd) {
                return Err(Error::internal(format!(
                    "derived generator at order {k} is not symplectic ({a}, {b})"
                )));
            }
        }
        Ok(SymplectoCurve { sd, c, c_inv, d: d.iter().map(frac).collect(), x })
    }

    pub fn sdata(&self) -> &SymplecticData {
        &self.sd
    }

    pub fn dim(&self) -> usize {
        self.sd.dim()
    }

    pub fn cap(&self) -> usize {
        self.x.cap()
    }

    pub fn linear_part(&self) -> &[Vec<i64>] {
        &self.c
    }

    pub fn translation(&self) -> &[Rational] {
        &self.d
    }

    pub fn generator(&self) -> &FieldCurve {
        &self.x
    }

    pub fn has_identity_affine_part(&self) -> bool {
        self.c == identity_rows(self.dim()) && self.d.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.has_identity_affine_part() && self.x.is_zero()
    }

    fn check_cap(&self, cap: usize) -> Result<()> {
        if self.cap() != cap {
            return Err(Error::CapMismatch { left: self.cap(), right: cap });
        }
        Ok(())
    }

    /// `σ⁻¹ = (C⁻¹, −C⁻¹d)`.
    fn inverse_translation(&self) -> Vec<Rational> {
        mul_vec(&self.c_inv, &self.d).into_iter().map(|x| -x).collect()
    }

    fn pull_function(&self, g: &ScalarCurve) -> Result<ScalarCurve> {
        g.try_map(|f| f.compose_affine(&self.c, &self.d))
    }

    /// `σ*·Y` on a vector-field curve.
    fn push_affine(&self, y: &FieldCurve) -> Result<FieldCurve> {
        y.try_map(|v| v.pull_affine(&self.c, &self.c_inv, &self.d))
    }

    /// `(σ⁻¹)*·Y`.
    fn push_affine_inverse(&self, y: &FieldCurve) -> Result<FieldCurve> {
        let tau = self.inverse_translation();
        y.try_map(|v| v.pull_affine(&self.c_inv, &self.c, &tau))
    }

    /// `ψ_t(g_t) = σ*(exp(X_t) g_t)`.
    pub fn apply_to_function(&self, g: &ScalarCurve) -> Result<ScalarCurve> {
        self.check_cap(g.cap())?;
        self.pull_function(&lie::exp_apply(&self.x, g)?)
    }

    /// `ψ_t·Y_t = σ*·(exp(ad X_t) Y_t)`, so that `(ψ·Y)(f) = ψ(Y(ψ⁻¹ f))`.
    pub fn act_on_vector_field(&self, y: &FieldCurve) -> Result<FieldCurve> {
        self.check_cap(y.cap())?;
        self.push_affine(&lie::exp_ad(&self.x, y)?)
    }

    /// `(ψ·∇)_{∂_a} ∂_b = ψ·(∇_{ψ⁻¹·∂_a} ψ⁻¹·∂_b)`, read off on the constant
    /// basis fields and lowered with ω.
    pub fn act_on_connection(&self, conn: &ConnectionCurve) -> Result<ConnectionCurve> {
        self.check_cap(conn.cap())?;
        if conn.sdata() != &self.sd {
            return Err(Error::pre("connection and symplectomorphism use different symplectic forms"));
        }
        let dim = self.dim();
        let cap = self.cap();
        let minus_x = self.x.neg();
        // ψ⁻¹·∂_a = exp(−ad X)((σ⁻¹)*·∂_a) and (σ⁻¹)*·∂_a = C e_a.
        let basis: Vec<FieldCurve> = (0..dim)
            .map(|a| {
                let col: Vec<Rational> = (0..dim).map(|j| rational::int(self.c[j][a])).collect();
                lie::exp_ad(&minus_x, &Series::constant(cap, FourierVectorField::constant(&col)))
            })
            .collect::<Result<Vec<_>>>()?;
        let images = exec::map_range(dim * dim, |ab| -> Result<FieldCurve> {
            let (a, b) = (ab / dim, ab % dim);
            let w = covariant_along(conn, &basis[a], &basis[b])?;
            self.act_on_vector_field(&w)
        });
        let images = images.into_iter().collect::<Result<Vec<_>>>()?;
        if let Some(ab) = images.iter().position(|w| !w.coeff(0).is_zero()) {
            return Err(Error::internal(format!("order-0 term of the transformed connection is nonzero at {ab}")));
        }
        let orders = (1..=cap)
            .map(|k| {
                TensorField::from_fn(dim, 3, |i| {
                    let w = images[i[0] * dim + i[1]].coeff(k);
                    let mut acc = FourierScalar::zero(dim);
                    for q in 0..dim {
                        acc.add_scaled_assign(w.comp(q), self.sd.lo(q, i[2]));
                    }
                    acc
                })
            })
            .collect();
        ConnectionCurve::new(self.sd.clone(), orders).map_err(|e| match e {
            Error::Asymmetric { idx, other } => Error::internal(format!(
                "transformed connection is not symmetric: {idx:?} vs {other:?}"
            )),
            e => e,
        })
    }

    /// Operator composition `ψ ∘ φ`, so that `(ψ∘φ)·T = ψ·(φ·T)`.
    ///
    /// With `ψ = σ₁*∘exp X₁` and `φ = σ₂*∘exp X₂`,
    /// `ψ∘φ = (σ₂∘σ₁)* ∘ exp((σ₂⁻¹)*·X₁) ∘ exp X₂`; the product of the two
    /// exponentials is brought back to a single exponential by reading its
    /// generator off probe functions.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_cap(other.cap())?;
        if self.sd != other.sd {
            return Err(Error::pre("symplectomorphisms use different symplectic forms"));
        }
        let y1 = other.push_affine_inverse(&self.x)?;
        let x2 = other.x.clone();
        let z = lie::identify_generator(self.dim(), self.cap(), |g| lie::exp_apply(&y1, &lie::exp_apply(&x2, g)?))?;
        let c = mul_rows(&other.c, &self.c);
        let c_inv = mul_rows(&self.c_inv, &other.c_inv);
        let d: Vec<Rational> = mul_vec(&other.c, &self.d).iter().zip(&other.d).map(|(a, b)| a + b).collect();
        Self::from_parts(self.sd.clone(), c, c_inv, d, z)
    }

    /// `ψ⁻¹ = (σ⁻¹)* ∘ exp(−σ*·X)`.
    pub fn inverse(&self) -> Result<Self> {
        let x = self.push_affine(&self.x)?.neg();
        let d = self.inverse_translation();
        Self::from_parts(self.sd.clone(), self.c_inv.clone(), self.c.clone(), d, x)
    }

    /// Writes `exp X_t = exp(t Y⁽¹⁾) ∘ exp(t² Y⁽²⁾) ∘ ⋯` and checks the
    /// product against `exp X_t` on probe functions. Zero factors are
    /// omitted from the returned list.
    pub fn factorize(&self) -> Result<Vec<(FourierVectorField, usize)>> {
        if !self.has_identity_affine_part() {
            return Err(Error::pre("factorization needs an identity affine part"));
        }
        let dim = self.dim();
        let cap = self.cap();
        let probes = lie::coordinate_probes(dim);
        let constant = |g: &FourierScalar| Series::constant(cap, g.clone());
        let mut factors: Vec<FieldCurve> = Vec::new();
        let product = |factors: &[FieldCurve], g: &ScalarCurve| -> Result<ScalarCurve> {
            factors.iter().rev().try_fold(g.clone(), |acc, y| lie::exp_apply(y, &acc))
        };
        let mut out = Vec::with_capacity(cap);
        for k in 1..=cap {
            let images = probes
                .iter()
                .map(|(c, s)| {
                    let (c, s) = (constant(c), constant(s));
                    let dc = lie::exp_apply(&self.x, &c)?.sub(&product(&factors, &c)?)?;
                    let ds = lie::exp_apply(&self.x, &s)?.sub(&product(&factors, &s)?)?;
                    Ok((dc.coeff(k).clone(), ds.coeff(k).clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            let yk = lie::derivation_from_probes(&probes, &images)?;
            if let Some((a, b)) = yk.symplectic_defect(&self.sd) {
                return Err(Error::internal(format!("factor at order {k} is not symplectic ({a}, {b})")));
            }
            factors.push(Series::monomial(cap, k, yk.clone()));
            if !yk.is_zero() {
                out.push((yk, k));
            }
        }
        for g in lie::verification_probes(dim) {
            let g = constant(&g);
            if product(&factors, &g)? != lie::exp_apply(&self.x, &g)? {
                return Err(Error::internal("factorization does not recompose to the flow"));
            }
        }
        Ok(out)
    }

    pub fn to_doc(&self) -> SymplectoDoc {
        SymplectoDoc {
            dim: self.dim(),
            cap: self.cap(),
            omega: OmegaDoc(self.sd.to_doc()),
            c: self.c.clone(),
            d: self.d.iter().map(rational::to_string).collect(),
            x: (1..=self.cap()).map(|k| VectorFieldDoc(self.x.coeff(k).to_doc())).collect(),
        }
    }

    pub fn from_doc(doc: &SymplectoDoc) -> Result<Self> {
        let sd = SymplecticData::from_doc(&doc.omega.0)?;
        if sd.dim() != doc.dim || doc.x.len() != doc.cap {
            return Err(Error::parse("symplectomorphism dimension or cap disagrees with its contents"));
        }
        let c = RatMatrix::from_i64_rows(&doc.c.iter().map(Vec::as_slice).collect::<Vec<_>>())?;
        let d = doc.d.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>()?;
        let x = doc
            .x
            .iter()
            .map(|v| FourierVectorField::from_doc(doc.dim, &v.0))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sd, &c, d, x)
    }
}

/// `∇^t_V W` for vector-field curves:
/// `(∇_V W)^c = V(W^c) + Σ Γ^c_{ij} V^i W^j`, convolved in `t`.
pub fn covariant_along(conn: &ConnectionCurve, v: &FieldCurve, w: &FieldCurve) -> Result<FieldCurve> {
    let dim = conn.dim();
    let cap = conn.cap();
    let one = rational::one();
    let orders = (0..=cap)
        .map(|k| {
            let mut acc = FourierVectorField::zero(dim);
            let mut comps: Vec<FourierScalar> = acc.comps().to_vec();
            for p in 0..=k {
                let (vp, wq) = (v.coeff(p), w.coeff(k - p));
                for (c, slot) in comps.iter_mut().enumerate() {
                    vp.apply_into(wq.comp(c), slot, &one);
                }
            }
            for p in 1..=k {
                let g = conn.gamma(p);
                for q in 0..=k - p {
                    let (vq, wr) = (v.coeff(q), w.coeff(k - p - q));
                    for i in 0..dim {
                        if vq.comp(i).is_empty() {
                            continue;
                        }
                        for j in 0..dim {
                            if wr.comp(j).is_empty() {
                                continue;
                            }
                            let vw = vq.comp(i).mul(wr.comp(j));
                            for (c, slot) in comps.iter_mut().enumerate() {
                                let gc = g.get(&[i, j, c]);
                                if !gc.is_empty() {
                                    slot.add_product_assign(gc, &vw, &one);
                                }
                            }
                        }
                    }
                }
            }
            acc = FourierVectorField::new(comps)?;
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    Series::from_coeffs(cap, orders)
}

/// Checks `ψ_f(a t^k) ∘ ψ_f(b t^k) = ψ_f((a+b) t^k)`.
pub fn one_param_group_check(
    sd: &SymplecticData,
    cap: usize,
    spec: &HamiltonianSpec,
    a: &Rational,
    b: &Rational,
) -> Result<bool> {
    let pa = SymplectoCurve::hamiltonian(sd.clone(), cap, spec, a)?;
    let pb = SymplectoCurve::hamiltonian(sd.clone(), cap, spec, b)?;
    let sum = SymplectoCurve::hamiltonian(sd.clone(), cap, spec, &(a + b))?;
    Ok(pa.compose(&pb)? == sum)
}

/// Serialized symplectomorphism curve. `d` is the translation in units of
/// the period `2π`; `X` lists the generator orders `1..=cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymplectoDoc {
    pub dim: usize,
    pub cap: usize,
    pub omega: OmegaDoc,
    #[serde(rename = "C")]
    pub c: Vec<Vec<i64>>,
    pub d: Vec<String>,
    #[serde(rename = "X")]
    pub x: Vec<VectorFieldDoc>,
}
