//! Conjugating a Ricci-type curve over `∇⁰` to a flat invariant one, one
//! order at a time, with the symplectomorphism that does it.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::curvature::{curvature_curve, extract_u_b, is_ricci_type, ConnectionCurve};
use crate::error::{Error, Result};
use crate::exact::rational;
use crate::exact::Gaussian;
use crate::fourier::{field_equal, FourierScalar, Mode, Symmetry, TensorField};
use crate::invariant::{flatness_theorem_check, Cube, StructureMapCurve, StructureMapDoc};
use crate::symplecto::{HamiltonianSpec, SymplectoCurve, SymplectoDoc};

/// `S = ∂³U + Q` with `U` free of constant mode and `Q` constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PotentialSplit {
    pub u: FourierScalar,
    pub q: Cube,
}

/// Splits a fully symmetric rank-3 field mode by mode. `order` only labels
/// the error.
pub fn potential_split(s: &TensorField, order: usize) -> Result<PotentialSplit> {
    let dim = s.dim();
    if s.rank() != 3 {
        return Err(Error::shape(format!("potential split needs rank 3, got {}", s.rank())));
    }
    s.check_symmetry(Symmetry::FullySymmetric)?;
    let q = Cube::from_fn(dim, |a, b, c| s.get(&[a, b, c]).mean());
    let modes: BTreeSet<Mode> = s
        .components()
        .iter()
        .flat_map(|f| f.iter().map(|(m, _)| m.clone()))
        .filter(|m| m.iter().any(|&x| x != 0))
        .collect();
    let zero = Gaussian::real(rational::zero());
    let mut entries = Vec::with_capacity(modes.len());
    for m in modes {
        let b = m.iter().position(|&x| x != 0).expect("nonzero mode");
        let mb = m[b];
        // S_{bbb}(m) = (i m_b)³ Û(m) = −i m_b³ Û(m)
        let sbbb = s.get(&[b, b, b]).coeff(&m).unwrap_or(&zero);
        let u_hat = sbbb.mul_i_int(1).scale(&rational::rat(1, mb * mb * mb));
        for flat in 0..s.components().len() {
            let idx = s.multi_index(flat);
            let expected = u_hat.mul_i_int(-(m[idx[0]] * m[idx[1]] * m[idx[2]]));
            let actual = s.components()[flat].coeff(&m).unwrap_or(&zero);
            if &expected != actual {
                return Err(Error::NotExactCube { order, mode: m, idx });
            }
        }
        if !num_traits::Zero::is_zero(&u_hat) {
            entries.push((m, u_hat));
        }
    }
    Ok(PotentialSplit { u: FourierScalar::from_modes(dim, entries)?, q })
}

/// One line of the per-order log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepLog {
    pub order: usize,
    pub potential_modes: usize,
    pub invariant_part_zero: bool,
    pub ricci_invariant: bool,
    pub u_invariant: bool,
    pub b_invariant: bool,
}

/// Result of one step of the recursion.
#[derive(Clone, Debug)]
pub struct Step {
    pub f: FourierScalar,
    pub q: Cube,
    pub curve: ConnectionCurve,
    pub log: StepLog,
}

/// Normalizes order `k` of a curve whose lower orders are already invariant:
/// checks that `r^(k)`, `u^(k)`, `b^(k)` are invariant, splits
/// `Ā^(k) = ∂³U + Q`, and applies `ψ_{−U}(t^k)`.
pub fn recurrence_step(c: &ConnectionCurve, k: usize) -> Result<Step> {
    if k == 0 || k > c.cap() {
        return Err(Error::pre(format!("order {k} outside 1..={}", c.cap())));
    }
    if let Some(j) = (1..k).find(|&j| !c.a_under(j).is_invariant()) {
        return Err(Error::pre(format!("order {j} is not yet invariant")));
    }
    let ub = extract_u_b(c)?;
    let ricci_invariant = crate::curvature::ricci_order(c, k)?.is_invariant();
    let u_invariant = ub.u.coeff(k).is_invariant();
    let b_invariant = ub.b.coeff(k).is_invariant();
    if !(ricci_invariant && u_invariant && b_invariant) {
        return Err(Error::internal(format!(
            "order {k}: r, u, b must be invariant (got {ricci_invariant}, {u_invariant}, {b_invariant})"
        )));
    }
    let split = potential_split(c.a_under(k), k)?;
    let f = split.u.neg();
    let psi = SymplectoCurve::hamiltonian(c.sdata().clone(), c.cap(), &HamiltonianSpec { f: f.clone(), order: k }, &rational::one())?;
    let curve = psi.act_on_connection(c)?;
    if let Some(j) = (1..k).find(|&j| curve.a_under(j) != c.a_under(j)) {
        return Err(Error::internal(format!("step {k} changed the already normalized order {j}")));
    }
    if !field_equal(curve.a_under(k), &split.q.to_field()) {
        return Err(Error::internal(format!("step {k} did not leave the invariant part behind")));
    }
    let log = StepLog {
        order: k,
        potential_modes: split.u.len(),
        invariant_part_zero: split.q.is_zero(),
        ricci_invariant,
        u_invariant,
        b_invariant,
    };
    Ok(Step { f, q: split.q, curve, log })
}

/// Flat invariant curve, witness with `witness·input = flat`, and the log.
#[derive(Clone, Debug)]
pub struct NormalizationResult {
    pub flat: StructureMapCurve,
    pub witness: SymplectoCurve,
    pub log: Vec<StepLog>,
}

impl NormalizationResult {
    pub fn to_doc(&self) -> NormalizationDoc {
        NormalizationDoc { flat: self.flat.to_doc(), witness: self.witness.to_doc(), log: self.log.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormalizationDoc {
    pub flat: StructureMapDoc,
    pub witness: SymplectoDoc,
    pub log: Vec<StepLog>,
}

/// Runs the recursion for `k = 1..=K` and verifies the outcome: the final
/// curve is invariant, satisfies the flatness theorem, equals
/// `witness·input`, and the input itself has vanishing curvature.
pub fn normalize_curve(c: &ConnectionCurve) -> Result<NormalizationResult> {
    c.sdata().require_theorem_dim()?;
    is_ricci_type(c)?.into_result()?;
    let mut curve = c.clone();
    let mut witness = SymplectoCurve::identity(c.sdata().clone(), c.cap());
    let mut log = Vec::with_capacity(c.cap());
    for k in 1..=c.cap() {
        let step = recurrence_step(&curve, k)?;
        if !step.f.is_empty() {
            let psi = SymplectoCurve::hamiltonian(
                c.sdata().clone(),
                c.cap(),
                &HamiltonianSpec { f: step.f.clone(), order: k },
                &rational::one(),
            )?;
            witness = psi.compose(&witness)?;
        }
        curve = step.curve;
        log.push(step.log);
    }
    if let Some(k) = curve.first_non_invariant_order() {
        return Err(Error::internal(format!("normalized curve is not invariant at order {k}")));
    }
    let flat = StructureMapCurve::from_connection(&curve)?;
    let report = flatness_theorem_check(&flat)?;
    if !report.passed() {
        return Err(Error::internal(format!("flatness theorem fails on the normalized curve: {report:?}")));
    }
    if witness.act_on_connection(c)? != curve {
        return Err(Error::internal("witness does not carry the input to the normalized curve"));
    }
    if let Some(k) = curvature_curve(c)?.coeffs().iter().position(|r| !r.is_zero()) {
        return Err(Error::internal(format!("normalizable input has curvature at order {k}")));
    }
    Ok(NormalizationResult { flat, witness, log })
}
