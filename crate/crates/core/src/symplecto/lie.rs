//! Truncated Lie series: flows of formal vector-field curves acting on
//! function curves and on vector-field curves.

use super::vector_field::FourierVectorField;
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exact::Series;
use crate::fourier::FourierScalar;

pub type FieldCurve = Series<FourierVectorField>;
pub type ScalarCurve = Series<FourierScalar>;

fn require_positive_valuation(x: &FieldCurve) -> Result<()> {
    if !x.coeff(0).is_zero() {
        return Err(Error::pre("a flow generator must have no order-0 term"));
    }
    Ok(())
}

/// `X_t(g_t)`, convolved in `t`.
pub fn apply_curve(x: &FieldCurve, g: &ScalarCurve, r: &Rational) -> Result<ScalarCurve> {
    x.check_cap(g)?;
    let dim = x.coeff(0).dim();
    let orders = (0..=x.cap())
        .map(|k| {
            let mut acc = FourierScalar::zero(dim);
            for p in 0..=k {
                x.coeff(p).apply_into(g.coeff(k - p), &mut acc, r);
            }
            acc
        })
        .collect();
    Series::from_coeffs(x.cap(), orders)
}

/// `[X_t, Y_t]`, convolved in `t`.
pub fn bracket_curve(x: &FieldCurve, y: &FieldCurve, r: &Rational) -> Result<FieldCurve> {
    x.check_cap(y)?;
    let dim = x.coeff(0).dim();
    let orders = (0..=x.cap())
        .map(|k| {
            let mut acc = FourierVectorField::zero(dim);
            for p in 0..=k {
                let (xp, yq) = (x.coeff(p), y.coeff(k - p));
                if !xp.is_zero() && !yq.is_zero() {
                    xp.bracket_into(yq, &mut acc, r);
                }
            }
            acc
        })
        .collect();
    Series::from_coeffs(x.cap(), orders)
}

/// `exp(X_t) g_t = Σ_j X_t^j g_t / j!`; finite since `X_t` has positive
/// valuation.
pub fn exp_apply(x: &FieldCurve, g: &ScalarCurve) -> Result<ScalarCurve> {
    require_positive_valuation(x)?;
    let mut acc = g.clone();
    let mut term = g.clone();
    for j in 1..=x.cap() {
        term = apply_curve(x, &term, &rational::rat(1, j as i64))?;
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// `exp(ad X_t) Y_t = Σ_j (ad X_t)^j Y_t / j!`.
pub fn exp_ad(x: &FieldCurve, y: &FieldCurve) -> Result<FieldCurve> {
    require_positive_valuation(x)?;
    let mut acc = y.clone();
    let mut term = y.clone();
    for j in 1..=x.cap() {
        term = bracket_curve(x, &term, &rational::rat(1, j as i64))?;
        if term.is_zero() {
            break;
        }
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// The probe functions `cos x_a`, `sin x_a` used to read a derivation off
/// its values.
pub fn coordinate_probes(dim: usize) -> Vec<(FourierScalar, FourierScalar)> {
    (0..dim)
        .map(|a| {
            let mut m = vec![0; dim];
            m[a] = 1;
            (FourierScalar::cos(&m), FourierScalar::sin(&m))
        })
        .collect()
}

/// Extra probes for a posteriori checks: coordinates plus two mixed modes.
pub fn verification_probes(dim: usize) -> Vec<FourierScalar> {
    let mut out: Vec<FourierScalar> =
        coordinate_probes(dim).into_iter().flat_map(|(c, s)| [c, s]).collect();
    let ones = vec![1; dim];
    out.push(FourierScalar::cos(&ones));
    let mut mixed = vec![0; dim];
    mixed[0] = 2;
    mixed[dim - 1] = -1;
    out.push(FourierScalar::sin(&mixed));
    out
}

/// Reads a derivation `D` off `D(cos x_a)`, `D(sin x_a)`:
/// `D^a = cos x_a · D(sin x_a) − sin x_a · D(cos x_a)`.
pub fn derivation_from_probes(
    probes: &[(FourierScalar, FourierScalar)],
    images: &[(FourierScalar, FourierScalar)],
) -> Result<FourierVectorField> {
    let comps = probes
        .iter()
        .zip(images)
        .map(|((c, s), (dc, ds))| c.mul(ds).sub(&s.mul(dc)))
        .collect();
    FourierVectorField::new(comps)
}

/// Finds `Z_t` with `op = exp(Z_t)` on functions, order by order, where `op`
/// is known to be such an exponential. The result is checked against `op` on
/// extra probes.
pub fn identify_generator<F>(dim: usize, cap: usize, op: F) -> Result<FieldCurve>
where
    F: Fn(&ScalarCurve) -> Result<ScalarCurve>,
{
    let probes = coordinate_probes(dim);
    let constant = |g: &FourierScalar| Series::constant(cap, g.clone());
    let targets = probes
        .iter()
        .map(|(c, s)| Ok((op(&constant(c))?, op(&constant(s))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut z = Series::constant(cap, FourierVectorField::zero(dim));
    for k in 1..=cap {
        let images = probes
            .iter()
            .zip(&targets)
            .map(|((c, s), (tc, ts))| {
                let ec = exp_apply(&z, &constant(c))?;
                let es = exp_apply(&z, &constant(s))?;
                Ok((tc.coeff(k).sub(ec.coeff(k)), ts.coeff(k).sub(es.coeff(k))))
            })
            .collect::<Result<Vec<_>>>()?;
        let zk = derivation_from_probes(&probes, &images)?;
        let mut orders = z.into_coeffs();
        orders[k] = zk;
        z = Series::from_coeffs(cap, orders)?;
    }
    for g in verification_probes(dim) {
        let g = constant(&g);
        if exp_apply(&z, &g)? != op(&g)? {
            return Err(Error::internal("operator is not the exponential of the identified generator"));
        }
    }
    Ok(z)
}
