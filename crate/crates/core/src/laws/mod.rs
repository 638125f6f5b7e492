//! Registered laws: executable statements checked over seeded fixtures, with
//! shrinking of failing fixtures.

pub mod fixtures;

use serde::Serialize;

use crate::curvature::{
    bianchi_check, curvature_curve, curvature_order, extract_u_b, ricci_order, CurvatureBundle,
};
use crate::euclidean::{psi_a, verify_psi_a};
use crate::exec;
use crate::fourier::FourierScalar;
use crate::invariant::{flatness_theorem_check, invariant_ricci_type_check};
use crate::moduli::{equivalence_semidecide, sp_action, validity_check, EquivalenceVerdict};
use crate::normalization::normalize_curve;
use crate::symplecto::{one_param_group_check, HamiltonianSpec, SymplectoCurve};
pub use fixtures::{Budget, FixtureSpec};

type Check = fn(&FixtureSpec) -> std::result::Result<(), String>;

/// One registered law.
#[derive(Clone, Copy)]
pub struct Law {
    pub id: &'static str,
    pub statement: &'static str,
    pub dim: usize,
    pub cap: usize,
    check: Check,
}

impl std::fmt::Debug for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.id, self.statement)
    }
}

impl Law {
    pub fn check(&self, spec: &FixtureSpec) -> std::result::Result<(), String> {
        (self.check)(spec)
    }

    pub fn spec(&self, seed: u64) -> FixtureSpec {
        FixtureSpec::new(seed, self.dim, self.cap)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn l1_ew_split(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let c = fixtures::random_curve(spec).map_err(err)?;
    let bundle = CurvatureBundle::compute(&c).map_err(err)?;
    for row in bundle.decomposition_rows(c.sdata()).map_err(err)? {
        ensure(row.passed(), || format!("decomposition fails: {row:?}"))?;
    }
    Ok(())
}

fn l2_bianchi(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let c = fixtures::random_curve(spec).map_err(err)?;
    for row in bianchi_check(&c).map_err(err)? {
        ensure(row.passed(), || format!("Bianchi fails: {row:?}"))?;
    }
    Ok(())
}

fn l3_flat_invariant(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let b = fixtures::random_ladder(spec).map_err(err)?;
    if let Some(w) = invariant_ricci_type_check(&b).map_err(err)? {
        return Err(format!("ladder is not of Ricci type: {w:?}"));
    }
    let report = flatness_theorem_check(&b).map_err(err)?;
    ensure(report.passed(), || format!("flatness theorem fails: {report:?}"))
}

fn l4_roundtrip_normalize(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let fx = fixtures::conjugated_flat(spec).map_err(err)?;
    let res = normalize_curve(&fx.input).map_err(err)?;
    let flat = res.flat.to_connection().map_err(err)?;
    ensure(flat.is_invariant(), || "normalized curve is not invariant".into())?;
    ensure(flatness_theorem_check(&res.flat).map_err(err)?.passed(), || "normalized curve is not flat".into())?;
    ensure(res.witness.act_on_connection(&fx.input).map_err(err)? == flat, || "witness·input ≠ output".into())?;
    let r = curvature_curve(&fx.input).map_err(err)?;
    ensure(r.is_zero(), || "input curvature is nonzero".into())
}

fn l5_low_orders(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let fx = fixtures::conjugated_flat(spec).map_err(err)?;
    let c = &fx.input;
    let ub = extract_u_b(c).map_err(err)?;
    for k in 0..=c.cap().min(2) {
        ensure(ricci_order(c, k).map_err(err)?.is_zero(), || format!("r^({k}) ≠ 0"))?;
        ensure(curvature_order(c, k).map_err(err)?.is_zero(), || format!("R^({k}) ≠ 0"))?;
        ensure(ub.u.coeff(k).is_zero(), || format!("u^({k}) ≠ 0"))?;
        ensure(ub.b.coeff(k).is_zero(), || format!("b^({k}) ≠ 0"))?;
    }
    Ok(())
}

fn l6_psi_a(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let curve = fixtures::random_ladder(spec).map_err(err)?;
    let sd = curve.sdata();
    // Every order of a ladder on a Lagrangian is a valid structure map on its own.
    let a = curve.cube(1).clone();
    let psi = psi_a(sd, &a, 0).map_err(err)?;
    let report = verify_psi_a(sd, &a, &psi).map_err(err)?;
    ensure(report.passed(), || format!("ψ^A checks fail: {report:?}"))?;
    let (x, y) = (fixtures::random_rational(spec, 1), fixtures::random_rational(spec, 2));
    let lhs = psi_a(sd, &a.scale(&x), 0).map_err(err)?.compose(&psi_a(sd, &a.scale(&y), 0).map_err(err)?).map_err(err)?;
    let rhs = psi_a(sd, &a.scale(&(&x + &y)), 0).map_err(err)?;
    ensure(lhs == rhs, || format!("ψ^(aA)∘ψ^(bA) ≠ ψ^((a+b)A) for a = {x}, b = {y}"))
}

fn l7_moduli(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let a = fixtures::random_ladder(spec).map_err(err)?;
    let sd = a.sdata();
    let mut rng = spec.rng(7);
    let c1 = fixtures::random_word(&mut rng, sd, 2).map_err(err)?;
    let c2 = fixtures::random_word(&mut rng, sd, 2).map_err(err)?;
    let c2a = sp_action(&c2, &a).map_err(err)?;
    let lhs = sp_action(&c1.mul(&c2).map_err(err)?, &a).map_err(err)?;
    let rhs = sp_action(&c1, &c2a).map_err(err)?;
    ensure(lhs == rhs, || "(C₁C₂)·A ≠ C₁·(C₂·A)".into())?;
    ensure(validity_check(&lhs).is_none(), || "validity not preserved".into())?;
    match equivalence_semidecide(&a, &c2a, 2).map_err(err)? {
        EquivalenceVerdict::Equivalent { .. } => Ok(()),
        other => Err(format!("planted word of length ≤ 2 not recovered: {other:?}")),
    }
}

fn l8_factorize(spec: &FixtureSpec) -> std::result::Result<(), String> {
    let psi = fixtures::random_hamiltonian_product(spec).map_err(err)?;
    let sd = psi.sdata().clone();
    let cap = psi.cap();
    let mut recomposed = SymplectoCurve::identity(sd.clone(), cap);
    for (y, k) in psi.factorize().map_err(err)? {
        let mut x = vec![crate::symplecto::FourierVectorField::zero(sd.dim()); cap];
        x[k - 1] = y;
        recomposed = recomposed.compose(&SymplectoCurve::flow(sd.clone(), x).map_err(err)?).map_err(err)?;
    }
    ensure(recomposed == psi, || "factors do not recompose".into())?;
    let f: FourierScalar = fixtures::hamiltonian_basis(sd.dim())[0].clone();
    let (a, b) = (fixtures::random_rational(spec, 3), fixtures::random_rational(spec, 4));
    let ok = one_param_group_check(&sd, cap, &HamiltonianSpec { f, order: 1 }, &a, &b).map_err(err)?;
    ensure(ok, || format!("one-parameter group law fails for a = {a}, b = {b}"))
}

pub fn registry() -> Vec<Law> {
    vec![
        Law { id: "L1", statement: "R = E + W and the Ricci contraction of W vanishes", dim: 4, cap: 2, check: l1_ew_split },
        Law { id: "L2", statement: "first and second Bianchi identities", dim: 4, cap: 2, check: l2_bianchi },
        Law { id: "L3", statement: "invariant Ricci type implies R = 0 and B(X)B(Y) = 0", dim: 4, cap: 3, check: l3_flat_invariant },
        Law { id: "L4", statement: "normalize round trip on conjugated flat curves", dim: 4, cap: 3, check: l4_roundtrip_normalize },
        Law { id: "L5", statement: "u, b, r, R vanish at orders 1 and 2 on Ricci-type curves", dim: 4, cap: 3, check: l5_low_orders },
        Law { id: "L6", statement: "ψ^A is symplectic, moves ∇⁰ to ∇^A, and is a one-parameter group", dim: 4, cap: 3, check: l6_psi_a },
        Law { id: "L7", statement: "Sp(2n,Z) action laws, validity preservation, plant and recover", dim: 4, cap: 2, check: l7_moduli },
        Law { id: "L8", statement: "factorization recomposes; Hamiltonian flows form one-parameter groups", dim: 4, cap: 3, check: l8_factorize },
    ]
}

pub fn law(id: &str) -> Option<Law> {
    registry().into_iter().find(|l| l.id == id)
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub spec: FixtureSpec,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawOutcome {
    pub law: &'static str,
    pub fixtures: usize,
    /// The original failing fixture and its shrunk form.
    pub failure: Option<(Counterexample, Counterexample)>,
}

impl LawOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Greedy shrinking: keep taking the first smaller spec that still fails.
pub fn shrink(law: &Law, spec: FixtureSpec, message: String) -> Counterexample {
    let mut best = Counterexample { spec, message };
    'outer: loop {
        for cand in best.spec.shrink_candidates() {
            if let Err(m) = law.check(&cand) {
                best = Counterexample { spec: cand, message: m };
                continue 'outer;
            }
        }
        return best;
    }
}

/// Runs one law over seeds in order, stopping at the first failure.
pub fn run_law(law: &Law, seeds: impl IntoIterator<Item = u64>) -> LawOutcome {
    let mut n = 0;
    for seed in seeds {
        n += 1;
        let spec = law.spec(seed);
        if let Err(message) = law.check(&spec) {
            let original = Counterexample { spec, message: message.clone() };
            let shrunk = shrink(law, spec, message);
            return LawOutcome { law: law.id, fixtures: n, failure: Some((original, shrunk)) };
        }
    }
    LawOutcome { law: law.id, fixtures: n, failure: None }
}

/// Every registered law, laws in parallel, fixtures of one law in sequence.
pub fn run_all(seeds_per_law: u64) -> Vec<LawOutcome> {
    exec::map_slice(&registry(), |law| run_law(law, 0..seeds_per_law))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete() {
        let ids: Vec<&str> = registry().iter().map(|l| l.id).collect();
        assert_eq!(ids, ["L1", "L2", "L3", "L4", "L5", "L6", "L7", "L8"]);
    }

    #[test]
    fn fixtures_are_reproducible() {
        let spec = FixtureSpec::new(7, 4, 2);
        assert_eq!(fixtures::random_curve(&spec).unwrap(), fixtures::random_curve(&spec).unwrap());
        assert_ne!(fixtures::random_curve(&spec).unwrap(), fixtures::random_curve(&FixtureSpec::new(8, 4, 2)).unwrap());
    }

    #[test]
    fn every_law_passes_two_seeds() {
        for law in registry() {
            let out = run_law(&law, 0..2);
            assert!(out.passed(), "{:?}", out.failure);
        }
    }

    #[test]
    fn shrinking_reaches_a_minimal_spec() {
        fn fails_when_big(spec: &FixtureSpec) -> std::result::Result<(), String> {
            if spec.cap >= 2 || spec.budget.modes >= 2 {
                Err("too big".into())
            } else {
                Ok(())
            }
        }
        let law = Law { id: "T", statement: "test", dim: 4, cap: 3, check: fails_when_big };
        let out = run_law(&law, 0..1);
        let (_, shrunk) = out.failure.unwrap();
        assert_eq!(shrunk.spec.budget.components, 1);
        assert_eq!(shrunk.spec.budget.max_mode, 1);
        assert!(shrunk.spec.cap == 2 || shrunk.spec.budget.modes == 2);
    }
}
