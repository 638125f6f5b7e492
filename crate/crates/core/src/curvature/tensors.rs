use serde::Serialize;

use super::connection::ConnectionCurve;
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::Series;
use crate::fourier::{FourierScalar, Symmetry, SymplecticData, TensorField};

/// A truncated series in `t` of tensor fields of one rank.
pub type TensorCurve = Series<TensorField>;

/// First nonzero component of a failing order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderWitness {
    pub order: usize,
    pub idx: Vec<usize>,
}

fn curve_from(cap: usize, orders: Vec<TensorField>) -> TensorCurve {
    Series::from_coeffs(cap, orders).expect("one field per order")
}

/// Copies `t_{abcd}` with `a < b` to `t_{bacd} = −t_{abcd}` and zeroes `a = b`.
fn fill_antisymmetric_pair(t: &mut TensorField) {
    let dim = t.dim();
    for a in 0..dim {
        for b in 0..=a {
            for c in 0..dim {
                for d in 0..dim {
                    let v = if a == b { FourierScalar::zero(dim) } else { t.get(&[b, a, c, d]).neg() };
                    t.set(&[a, b, c, d], v);
                }
            }
        }
    }
}

/// `R^(k)_{abcd}` for one order, lowered with ω.
pub fn curvature_order(c: &ConnectionCurve, k: usize) -> Result<TensorField> {
    let dim = c.dim();
    if k == 0 {
        return Ok(TensorField::zeros(dim, 4).tag_unchecked(Symmetry::CurvatureType));
    }
    let ak = c.a_under(k);
    let one = rational::one();
    let minus = -rational::one();
    let mut t = TensorField::from_fn(dim, 4, |i| {
        let (a, b, cc, d) = (i[0], i[1], i[2], i[3]);
        if a >= b {
            return FourierScalar::zero(dim);
        }
        let mut acc = ak.get(&[b, cc, d]).derivative(a).expect("index in range");
        acc.add_scaled_assign(&ak.get(&[a, cc, d]).derivative(b).expect("index in range"), &minus);
        for p in 1..k {
            let (gq, ap) = (c.gamma(k - p), c.a_under(p));
            for f in 0..dim {
                acc.add_product_assign(gq.get(&[b, cc, f]), ap.get(&[a, f, d]), &one);
                acc.add_product_assign(gq.get(&[a, cc, f]), ap.get(&[b, f, d]), &minus);
            }
        }
        acc
    });
    fill_antisymmetric_pair(&mut t);
    t.check_symmetry(Symmetry::CurvatureType)
        .map_err(|e| Error::internal(format!("curvature at order {k} lost its symmetries: {e}")))?;
    Ok(t.tag_unchecked(Symmetry::CurvatureType))
}

/// The lowered formal curvature `R^t`, orders `0..=K`.
pub fn curvature_curve(c: &ConnectionCurve) -> Result<TensorCurve> {
    let orders = (0..=c.cap()).map(|k| curvature_order(c, k)).collect::<Result<Vec<_>>>()?;
    Ok(curve_from(c.cap(), orders))
}

/// `r^(k)_{ac} = −∂_b Γ^b_{ac}(k) + Σ_{p+q=k} Γ^b_{ae}(p) Γ^e_{bc}(q)`, the
/// trace `r(X, Y) = Tr[Z ↦ R(X, Z)Y]` written in coordinates.
pub fn ricci_order(c: &ConnectionCurve, k: usize) -> Result<TensorField> {
    let dim = c.dim();
    if k == 0 {
        return Ok(TensorField::zeros(dim, 2).tag_unchecked(Symmetry::FullySymmetric));
    }
    let gk = c.gamma(k);
    let one = rational::one();
    let minus = -rational::one();
    let t = TensorField::from_fn(dim, 2, |i| {
        let (a, cc) = (i[0], i[1]);
        let mut acc = FourierScalar::zero(dim);
        for b in 0..dim {
            acc.add_scaled_assign(&gk.get(&[a, cc, b]).derivative(b).expect("index in range"), &minus);
        }
        for p in 1..k {
            let (gp, gq) = (c.gamma(p), c.gamma(k - p));
            for b in 0..dim {
                for e in 0..dim {
                    acc.add_product_assign(gp.get(&[a, e, b]), gq.get(&[b, cc, e]), &one);
                }
            }
        }
        acc
    });
    t.with_symmetry(Symmetry::FullySymmetric)
        .map_err(|e| Error::internal(format!("Ricci tensor at order {k} is not symmetric: {e}")))
}

pub fn ricci_curve(c: &ConnectionCurve) -> Result<TensorCurve> {
    let orders = (0..=c.cap()).map(|k| ricci_order(c, k)).collect::<Result<Vec<_>>>()?;
    Ok(curve_from(c.cap(), orders))
}

/// Ricci contraction of a lowered curvature-type tensor:
/// `r_{ac} = Σ_{b,d} R_{abcd} ω^{db}`.
pub fn ricci_contraction(sd: &SymplecticData, r: &TensorField) -> Result<TensorField> {
    r.contract_with_omega_hi(sd, 3, 1)
}

pub fn ricci_from_curvature(sd: &SymplecticData, r: &TensorCurve) -> Result<TensorCurve> {
    r.try_map(|t| ricci_contraction(sd, t))
}

/// The Ricci part `E` built from a symmetric 2-tensor `r`.
pub fn ricci_part(sd: &SymplecticData, r: &TensorField) -> TensorField {
    let dim = sd.dim();
    let pref = rational::rat(-1, 2 * (sd.half_dim() as i64 + 1));
    let two = rational::int(2);
    let minus = -rational::one();
    let terms = |a: usize, b: usize, c: usize, d: usize| -> Vec<(Rational, [usize; 2])> {
        vec![
            (sd.lo(a, b) * &two, [c, d]),
            (sd.lo(a, c).clone(), [b, d]),
            (sd.lo(a, d).clone(), [b, c]),
            (sd.lo(b, c) * &minus, [a, d]),
            (sd.lo(b, d) * &minus, [a, c]),
        ]
    };
    TensorField::from_fn(dim, 4, |i| {
        let mut acc = FourierScalar::zero(dim);
        for (w, idx) in terms(i[0], i[1], i[2], i[3]) {
            acc.add_scaled_assign(r.get(&idx), &(w * &pref));
        }
        acc
    })
    .tag_unchecked(Symmetry::CurvatureType)
}

/// Splits `R = E + W` order by order.
pub fn ew_split(sd: &SymplecticData, r_full: &TensorCurve, ricci: &TensorCurve) -> Result<(TensorCurve, TensorCurve)> {
    r_full.check_cap(ricci)?;
    let e = ricci.map(|r| ricci_part(sd, r));
    let w = r_full.zip_with(&e, |r, e| r.sub(e).map(|t| t.tag_unchecked(Symmetry::CurvatureType)))?;
    let w = Series::from_coeffs(w.cap(), w.into_coeffs().into_iter().collect::<Result<Vec<_>>>()?)?;
    Ok((e, w))
}

/// Covariant derivative of a curve of covariant tensors; the new index is
/// placed first:
/// `(∇T)_{e a₁..a_r}(k) = ∂_e T(k) − Σ_{p≥1} Σ_s Σ_f Γ^f_{e a_s}(p) T(k−p)_{..f..}`.
pub fn covariant_derivative(c: &ConnectionCurve, t: &TensorCurve) -> Result<TensorCurve> {
    if t.cap() != c.cap() {
        return Err(Error::CapMismatch { left: c.cap(), right: t.cap() });
    }
    let dim = c.dim();
    let rank = t.coeff(0).rank();
    let minus = -rational::one();
    let orders = (0..=c.cap())
        .map(|k| {
            let tk = t.coeff(k);
            if tk.dim() != dim || tk.rank() != rank {
                return Err(Error::shape("tensor curve orders disagree in shape"));
            }
            Ok(TensorField::from_fn(dim, rank + 1, |i| {
                let e = i[0];
                let rest = &i[1..];
                let mut acc = tk.get(rest).derivative(e).expect("index in range");
                let mut idx = rest.to_vec();
                for p in 1..=k {
                    let (gp, tq) = (c.gamma(p), t.coeff(k - p));
                    for s in 0..rank {
                        let slot = rest[s];
                        for f in 0..dim {
                            idx[s] = f;
                            acc.add_product_assign(gp.get(&[e, slot, f]), tq.get(&idx), &minus);
                        }
                        idx[s] = slot;
                    }
                }
                acc
            }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(curve_from(c.cap(), orders))
}

/// Per-order outcome of the Bianchi identities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BianchiRow {
    pub order: usize,
    pub symmetries: bool,
    pub first: bool,
    pub second: bool,
}

impl BianchiRow {
    pub fn passed(&self) -> bool {
        self.symmetries && self.first && self.second
    }
}

pub fn bianchi_check(c: &ConnectionCurve) -> Result<Vec<BianchiRow>> {
    bianchi_check_with(c, &curvature_curve(c)?)
}

/// Checks the cyclic identities for a supplied curvature curve, which lets a
/// caller feed a deliberately damaged tensor.
pub fn bianchi_check_with(c: &ConnectionCurve, r: &TensorCurve) -> Result<Vec<BianchiRow>> {
    let nabla_r = covariant_derivative(c, r)?;
    (0..=c.cap())
        .map(|k| {
            let rk = r.coeff(k);
            Ok(BianchiRow {
                order: k,
                symmetries: rk.check_symmetry(Symmetry::CurvatureType).is_ok(),
                first: rk.cyclic_sum(0, 1, 2)?.is_zero(),
                second: nabla_r.coeff(k).cyclic_sum(0, 1, 2)?.is_zero(),
            })
        })
        .collect()
}

/// Outcome of the `W = 0` test through the cap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RicciTypeCheck {
    pub holds: bool,
    pub first_failure: Option<OrderWitness>,
}

impl RicciTypeCheck {
    pub fn into_result(self) -> Result<()> {
        match self.first_failure {
            None => Ok(()),
            Some(w) => Err(Error::NotRicciType { order: w.order, idx: w.idx }),
        }
    }
}

/// All curvature-derived curves of a connection curve.
#[derive(Clone, Debug)]
pub struct CurvatureBundle {
    pub r_full: TensorCurve,
    pub ricci: TensorCurve,
    pub e: TensorCurve,
    pub w: TensorCurve,
}

impl CurvatureBundle {
    pub fn compute(c: &ConnectionCurve) -> Result<Self> {
        let r_full = curvature_curve(c)?;
        let ricci = ricci_curve(c)?;
        let (e, w) = ew_split(c.sdata(), &r_full, &ricci)?;
        Ok(CurvatureBundle { r_full, ricci, e, w })
    }

    pub fn ricci_type(&self) -> RicciTypeCheck {
        let first_failure = (0..=self.w.cap())
            .find_map(|k| self.w.coeff(k).first_nonzero().map(|idx| OrderWitness { order: k, idx }));
        RicciTypeCheck { holds: first_failure.is_none(), first_failure }
    }

    /// Per order: `R = E + W`, the Ricci contraction of `W` vanishes, and the
    /// directly computed Ricci tensor equals the contraction of `R`.
    pub fn decomposition_rows(&self, sd: &SymplecticData) -> Result<Vec<DecompositionRow>> {
        (0..=self.r_full.cap())
            .map(|k| {
                let recon = self.e.coeff(k).add(self.w.coeff(k))?;
                Ok(DecompositionRow {
                    order: k,
                    reconstruction: crate::fourier::field_equal(&recon, self.r_full.coeff(k)),
                    w_trace_free: ricci_contraction(sd, self.w.coeff(k))?.is_zero(),
                    ricci_paths_agree: crate::fourier::field_equal(
                        &ricci_contraction(sd, self.r_full.coeff(k))?,
                        self.ricci.coeff(k),
                    ),
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionRow {
    pub order: usize,
    pub reconstruction: bool,
    pub w_trace_free: bool,
    pub ricci_paths_agree: bool,
}

impl DecompositionRow {
    pub fn passed(&self) -> bool {
        self.reconstruction && self.w_trace_free && self.ricci_paths_agree
    }
}

pub fn is_ricci_type(c: &ConnectionCurve) -> Result<RicciTypeCheck> {
    Ok(CurvatureBundle::compute(c)?.ricci_type())
}
