use serde::Serialize;

use super::connection::ConnectionCurve;
use super::tensors::{covariant_derivative, ricci_curve, CurvatureBundle, TensorCurve};
use crate::error::{Error, Result};
use crate::exact::rational;
use crate::exact::Series;
use crate::fourier::{FourierScalar, SymplecticData, TensorField};

/// The 1-form curve `u^t`, the function curve `b^t`, and the exact residuals
/// of the three identities they are defined by.
#[derive(Clone, Debug)]
pub struct UbExtraction {
    pub u: TensorCurve,
    pub b: TensorCurve,
    pub rho: TensorCurve,
    pub residuals: Vec<ResidualRow>,
}

/// Total Fourier support of each residual at one order; all zero on success.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResidualRow {
    pub order: usize,
    pub ricci_derivative: usize,
    pub u_derivative: usize,
    pub b_derivative: usize,
    pub b_shift_gradient: usize,
}

impl ResidualRow {
    pub fn is_exact(&self) -> bool {
        self.ricci_derivative == 0 && self.u_derivative == 0 && self.b_derivative == 0 && self.b_shift_gradient == 0
    }
}

fn omega_field(sd: &SymplecticData) -> TensorField {
    TensorField::constant_from_fn(sd.dim(), 2, |i| sd.lo(i[0], i[1]).clone())
}

/// Cauchy product of two curves of endomorphisms stored as `[upper, lower]`.
fn endo_square(dim: usize, rho: &TensorCurve) -> TensorCurve {
    let one = rational::one();
    let orders = (0..=rho.cap())
        .map(|k| {
            TensorField::from_fn(dim, 2, |i| {
                let mut acc = FourierScalar::zero(dim);
                for p in 0..=k {
                    for e in 0..dim {
                        acc.add_product_assign(rho.coeff(p).get(&[i[0], e]), rho.coeff(k - p).get(&[e, i[1]]), &one);
                    }
                }
                acc
            })
        })
        .collect();
    Series::from_coeffs(rho.cap(), orders).expect("one field per order")
}

/// Recovers `u^t` and `b^t` of a Ricci-type curve and re-verifies
///
/// * `(∇_a r)_{bc} = (ω_{ab} u_c + ω_{ac} u_b) / (2n+1)`
/// * `∇u = −(1+2n)/(2(1+n)) r⁽²⁾ + b ω`
/// * `∂_a b = (1/(1+n)) ū^c r_{ca}` with `ū^c = u_b ω^{bc}`
/// * `∂_a (b + (2n+1)/(4(1+n)) Tr ρ²) = 0`
///
/// exactly at every order. A nonzero residual is reported as an internal
/// error: the input was already checked to be of Ricci type.
pub fn extract_u_b(c: &ConnectionCurve) -> Result<UbExtraction> {
    let sd = c.sdata();
    sd.require_theorem_dim()?;
    CurvatureBundle::compute(c)?.ricci_type().into_result()?;

    let dim = sd.dim();
    let n = sd.half_dim() as i64;
    let cap = c.cap();
    let r = ricci_curve(c)?;
    let nabla_r = covariant_derivative(c, &r)?;

    // Contracting the first identity with ω^{ab} gives
    // Σ ω^{ab}(∇_a r)_{bc} = (−2n u_c − u_c)/(2n+1) = −u_c.
    let u = nabla_r.try_map(|t| Ok(t.contract_with_omega_hi(sd, 0, 1)?.neg()))?;

    // ρ^c_b = Σ_a ω^{ca} r_{ab}, so that r(X, Y) = ω(X, ρY).
    let rho = r.try_map(|t| t.mix_slot(0, |a, cc| sd.hi(cc, a).clone()))?;
    let rho2 = endo_square(dim, &rho);
    let r2 = rho2.try_map(|t| t.mix_slot(0, |cc, a| sd.lo(a, cc).clone()))?;

    let coef_u = rational::rat(1 + 2 * n, 2 * (1 + n));
    let nabla_u = covariant_derivative(c, &u)?;
    let b = nabla_u.zip_with(&r2, |nu, r2| -> Result<TensorField> {
        let s = nu.add(&r2.scale(&coef_u))?;
        Ok(s.contract_with_omega_hi(sd, 0, 1)?.scale(&rational::rat(-1, 2 * n)))
    })?;
    let b = Series::from_coeffs(cap, b.into_coeffs().into_iter().collect::<Result<Vec<_>>>()?)?;

    let omega = omega_field(sd);
    let u_bar = u.try_map(|t| t.raise_slot(sd, 0))?;
    let inv_2n1 = rational::rat(1, 2 * n + 1);
    let inv_n1 = rational::rat(1, 1 + n);
    let coef_tr = rational::rat(2 * n + 1, 4 * (1 + n));
    let neg_inv_n1 = -inv_n1;

    let mut residuals = Vec::with_capacity(cap + 1);
    for k in 0..=cap {
        let uk = u.coeff(k);
        let expected = TensorField::from_fn(dim, 3, |i| {
            let (a, bb, cc) = (i[0], i[1], i[2]);
            let mut acc = FourierScalar::zero(dim);
            acc.add_scaled_assign(uk.get(&[cc]), &(sd.lo(a, bb) * &inv_2n1));
            acc.add_scaled_assign(uk.get(&[bb]), &(sd.lo(a, cc) * &inv_2n1));
            acc
        });
        let res_r = nabla_r.coeff(k).sub(&expected)?;

        let bk = b.coeff(k).get(&[]);
        let res_u = nabla_u.coeff(k).add(&r2.coeff(k).scale(&coef_u))?.sub(&omega.mul_scalar_field(bk))?;

        let res_b = TensorField::from_fn(dim, 1, |i| {
            let a = i[0];
            let mut acc = bk.derivative(a).expect("index in range");
            for p in 0..=k {
                for cc in 0..dim {
                    acc.add_product_assign(
                        u_bar.coeff(p).get(&[cc]),
                        r.coeff(k - p).get(&[cc, a]),
                        &neg_inv_n1,
                    );
                }
            }
            acc
        });

        let mut trace = FourierScalar::zero(dim);
        for cc in 0..dim {
            trace.add_assign(rho2.coeff(k).get(&[cc, cc]));
        }
        let mut shifted = bk.clone();
        shifted.add_scaled_assign(&trace, &coef_tr);
        let res_shift = TensorField::scalar(shifted).gradient();

        residuals.push(ResidualRow {
            order: k,
            ricci_derivative: res_r.total_support(),
            u_derivative: res_u.total_support(),
            b_derivative: res_b.total_support(),
            b_shift_gradient: res_shift.total_support(),
        });
    }
    if let Some(bad) = residuals.iter().find(|row| !row.is_exact()) {
        return Err(Error::internal(format!("u/b residuals do not vanish on a Ricci-type curve: {bad:?}")));
    }
    Ok(UbExtraction { u, b, rho, residuals })
}
