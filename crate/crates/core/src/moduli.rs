//! Flat invariant curves on the torus modulo `Sp(2n, ℤ)`: validity, the
//! lattice action, cheap orbit invariants and a bounded equivalence search.

use std::collections::HashSet;

use num_traits::Zero;
use serde::Serialize;

use crate::curvature::{curvature_curve, is_ricci_type, ConnectionCurve};
use crate::error::{Error, Result};
use crate::exact::rational::{self, Rational};
use crate::exec;
use crate::fourier::SymplecticData;
use crate::invariant::{product_witness, Cube, StructureMapCurve};
use crate::linalg::RatMatrix;

/// Why a structure-map curve is not admissible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "identity", rename_all = "snake_case")]
pub enum ValidityWitness {
    /// `A^t(e_x) e_y ≠ A^t(e_y) e_x` at this order.
    NotSymmetric { order: usize, x: usize, y: usize },
    /// `A^t(e_x) A^t(e_y) ≠ 0` at this order.
    ProductNonzero { order: usize, x: usize, y: usize },
}

/// Checks `A^t(X)Y = A^t(Y)X` and `A^t(X)A^t(Y) = 0` order by order on
/// basis vectors.
pub fn validity_check(a: &StructureMapCurve) -> Option<ValidityWitness> {
    let dim = a.dim();
    for (k, m) in a.endos().iter().enumerate() {
        for x in 0..dim {
            for y in x + 1..dim {
                if (0..dim).any(|c| m[x][(c, y)] != m[y][(c, x)]) {
                    return Some(ValidityWitness::NotSymmetric { order: k, x, y });
                }
            }
        }
    }
    product_witness(a).map(|(order, x, y)| ValidityWitness::ProductNonzero { order, x, y })
}

/// Integer matrix preserving `ω`, together with its integer inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSymplectic {
    m: RatMatrix,
    inv: RatMatrix,
}

impl LatticeSymplectic {
    pub fn new(sd: &SymplecticData, m: RatMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() != sd.dim() {
            return Err(Error::shape(format!("need a {0}x{0} matrix", sd.dim())));
        }
        if !m.is_integral() {
            return Err(Error::NotLatticeSymplectic("entries are not integers".into()));
        }
        if !sd.preserves(&m) {
            return Err(Error::NotLatticeSymplectic("matrix does not preserve ω".into()));
        }
        let inv = m.inverse()?;
        if !inv.is_integral() {
            return Err(Error::NotLatticeSymplectic("inverse is not integral".into()));
        }
        Ok(LatticeSymplectic { m, inv })
    }

    pub fn from_rows(sd: &SymplecticData, rows: &[Vec<i64>]) -> Result<Self> {
        let r: Vec<Vec<Rational>> = rows.iter().map(|row| row.iter().map(|&x| rational::int(x)).collect()).collect();
        Self::new(sd, RatMatrix::from_rows(r)?)
    }

    pub fn identity(dim: usize) -> Self {
        LatticeSymplectic { m: RatMatrix::identity(dim), inv: RatMatrix::identity(dim) }
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.m
    }

    pub fn inverse_matrix(&self) -> &RatMatrix {
        &self.inv
    }

    pub fn to_rows(&self) -> Vec<Vec<i64>> {
        self.m.to_i64_rows().expect("integral by construction")
    }

    /// `self · other` as matrices.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(LatticeSymplectic { m: self.m.mul(&other.m)?, inv: other.inv.mul(&self.inv)? })
    }

    pub fn inverse(&self) -> Self {
        LatticeSymplectic { m: self.inv.clone(), inv: self.m.clone() }
    }
}

/// `(C·B)^t(X)Y = C·B^t(C⁻¹X)(C⁻¹Y)`; on cubes this is
/// `(C·B̲)(X, Y, Z) = B̲(C⁻¹X, C⁻¹Y, C⁻¹Z)`.
pub fn sp_action(c: &LatticeSymplectic, b: &StructureMapCurve) -> Result<StructureMapCurve> {
    let dim = b.dim();
    if c.m.rows() != dim {
        return Err(Error::shape("matrix and curve dimensions differ"));
    }
    let d = &c.inv;
    let cubes = b
        .cubes()
        .iter()
        .map(|cube| {
            if cube.is_zero() {
                return cube.clone();
            }
            // Contract one slot at a time: T1_{a q r} = Σ_p B̲_{pqr} D_{pa}, …
            let step = |t: &[Rational], slot: usize| -> Vec<Rational> {
                let mut out = vec![rational::zero(); dim * dim * dim];
                for i in 0..dim {
                    for j in 0..dim {
                        for k in 0..dim {
                            let src = [i, j, k];
                            let v = &t[(i * dim + j) * dim + k];
                            if v.is_zero() {
                                continue;
                            }
                            for a in 0..dim {
                                let w = &d[(src[slot], a)];
                                if w.is_zero() {
                                    continue;
                                }
                                let mut dst = src;
                                dst[slot] = a;
                                out[(dst[0] * dim + dst[1]) * dim + dst[2]] += v * w;
                            }
                        }
                    }
                }
                out
            };
            let t = step(&step(&step(cube.entries(), 0), 1), 2);
            Cube::from_fn(dim, |a, bb, cc| t[(a * dim + bb) * dim + cc].clone())
        })
        .collect();
    StructureMapCurve::new(b.sdata().clone(), cubes)
}

/// Transvection `x ↦ x + ω(v, x) v`.
pub fn transvection(sd: &SymplecticData, v: &[i64]) -> Result<LatticeSymplectic> {
    let dim = sd.dim();
    let vr: Vec<Rational> = v.iter().map(|&x| rational::int(x)).collect();
    let m = RatMatrix::from_fn(dim, dim, |i, j| {
        let pair: Rational = (0..dim).map(|p| &vr[p] * sd.lo(p, j)).sum();
        let id = if i == j { rational::one() } else { rational::zero() };
        id + &vr[i] * pair
    });
    LatticeSymplectic::new(sd, m)
}

/// A fixed generator list, in this order: transvections along `e_i`, then
/// along `e_i + e_j` (`i < j`), each followed by its inverse; then the matrix
/// of `ω` and its inverse when they lie in the lattice group. Candidates that
/// are not integral for a nonstandard `ω` are dropped.
pub fn generators(sd: &SymplecticData) -> Vec<LatticeSymplectic> {
    let dim = sd.dim();
    let mut vs = Vec::new();
    for i in 0..dim {
        let mut v = vec![0; dim];
        v[i] = 1;
        vs.push(v);
    }
    for i in 0..dim {
        for j in i + 1..dim {
            let mut v = vec![0; dim];
            v[i] = 1;
            v[j] = 1;
            vs.push(v);
        }
    }
    let mut out = Vec::new();
    for v in vs {
        if let Ok(t) = transvection(sd, &v) {
            out.push(t.clone());
            out.push(t.inverse());
        }
    }
    if let Ok(j) = LatticeSymplectic::new(sd, sd.lo_matrix().clone()) {
        out.push(j.clone());
        out.push(j.inverse());
    }
    out
}

/// Per-order ranks that no symplectic change of basis can alter.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheapInvariants {
    /// Rank of the cube at order `k` as a map `ℝ^dim → Sym²`.
    pub order_rank: Vec<usize>,
    /// `dim span {A^{(j)}(X)Y : j ≤ k}`.
    pub cumulative_rank: Vec<usize>,
    /// `dim {X : A^{(k)}(X) = 0}`.
    pub kernel_dim: Vec<usize>,
    /// Rank of `A^{(j)} + A^{(k)}` for `1 ≤ j < k`, row-major in `(j, k)`.
    pub pencil_rank: Vec<usize>,
}

fn flattening(cubes: &[&Cube]) -> RatMatrix {
    let dim = cubes[0].dim();
    let cols = dim * dim;
    RatMatrix::from_fn(dim * cubes.len(), cols, |r, c| cubes[r / dim].get(r % dim, c / dim, c % dim).clone())
}

pub fn cheap_invariants(a: &StructureMapCurve) -> CheapInvariants {
    let dim = a.dim();
    let cubes = a.cubes();
    let order_rank: Vec<usize> = cubes.iter().map(|c| flattening(&[c]).rank()).collect();
    let cumulative_rank = (0..cubes.len()).map(|k| flattening(&cubes[..=k].iter().collect::<Vec<_>>()).rank()).collect();
    let kernel_dim = order_rank.iter().map(|r| dim - r).collect();
    let mut pencil_rank = Vec::new();
    for j in 1..cubes.len() {
        for k in j + 1..cubes.len() {
            pencil_rank.push(flattening(&[&cubes[j].add(&cubes[k])]).rank());
        }
    }
    CheapInvariants { order_rank, cumulative_rank, kernel_dim, pencil_rank }
}

/// Names the first invariant that differs.
fn separating(a: &CheapInvariants, b: &CheapInvariants) -> Option<(&'static str, Vec<usize>, Vec<usize>)> {
    let pairs: [(&'static str, &Vec<usize>, &Vec<usize>); 4] = [
        ("order_rank", &a.order_rank, &b.order_rank),
        ("cumulative_rank", &a.cumulative_rank, &b.cumulative_rank),
        ("kernel_dim", &a.kernel_dim, &b.kernel_dim),
        ("pencil_rank", &a.pencil_rank, &b.pencil_rank),
    ];
    pairs.into_iter().find(|(_, x, y)| x != y).map(|(n, x, y)| (n, x.clone(), y.clone()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum EquivalenceVerdict {
    /// `B = C·A`; `word` lists generator indices, applied left to right as
    /// `C = g[w_0] g[w_1] …`.
    Equivalent { witness: Vec<Vec<i64>>, word: Vec<usize> },
    /// Every group element of word length `≤ bound` was tried.
    NoWitnessWithinBound { bound: usize, searched: usize },
    Distinct { invariant: String, left: Vec<usize>, right: Vec<usize> },
}

/// Decides `A ~ B` under `Sp(2n, ℤ)` as far as cheap invariants and words of
/// length `≤ bound` allow.
pub fn equivalence_semidecide(a: &StructureMapCurve, b: &StructureMapCurve, bound: usize) -> Result<EquivalenceVerdict> {
    if a.sdata() != b.sdata() || a.cap() != b.cap() {
        return Err(Error::pre("both curves need the same ω and cap"));
    }
    for (name, c) in [("first", a), ("second", b)] {
        if let Some(w) = validity_check(c) {
            return Err(Error::InvalidStructureMap(format!("{name} curve: {w:?}")));
        }
    }
    if let Some((name, l, r)) = separating(&cheap_invariants(a), &cheap_invariants(b)) {
        return Ok(EquivalenceVerdict::Distinct { invariant: name.to_string(), left: l, right: r });
    }
    let sd = a.sdata();
    let gens = generators(sd);
    let mut seen: HashSet<LatticeSymplectic> = HashSet::new();
    let id = LatticeSymplectic::identity(sd.dim());
    seen.insert(id.clone());
    let mut level: Vec<(Vec<usize>, LatticeSymplectic)> = vec![(Vec::new(), id)];
    let mut searched = 0;
    for len in 0..=bound {
        if len > 0 {
            let mut next = Vec::new();
            for (word, m) in &level {
                for (gi, g) in gens.iter().enumerate() {
                    let prod = m.mul(g)?;
                    if seen.insert(prod.clone()) {
                        let mut w = word.clone();
                        w.push(gi);
                        next.push((w, prod));
                    }
                }
            }
            level = next;
        }
        searched += level.len();
        // Words within a level are already in lexicographic order, so the
        // first hit is the least witness.
        let hits = exec::map_slice(&level, |(_, c)| sp_action(c, a).map(|ca| &ca == b));
        for ((word, c), hit) in level.iter().zip(hits) {
            if hit? {
                return Ok(EquivalenceVerdict::Equivalent { witness: c.to_rows(), word: word.clone() });
            }
        }
    }
    Ok(EquivalenceVerdict::NoWitnessWithinBound { bound, searched })
}

/// Group element for a word over [`generators`].
pub fn word_element(sd: &SymplecticData, word: &[usize]) -> Result<LatticeSymplectic> {
    let gens = generators(sd);
    let mut acc = LatticeSymplectic::identity(sd.dim());
    for &i in word {
        let g = gens.get(i).ok_or(Error::IndexOutOfRange { index: i, dim: gens.len() })?;
        acc = acc.mul(g)?;
    }
    Ok(acc)
}

/// The torus-side reading of a structure-map curve.
#[derive(Clone, Debug)]
pub struct DescendReport {
    pub connection: ConnectionCurve,
    pub ricci_type: bool,
    pub flat: bool,
}

impl DescendReport {
    pub fn passed(&self) -> bool {
        self.ricci_type && self.flat
    }
}

/// Embeds `A` as an invariant curve on the torus and runs the curvature
/// checks on it.
pub fn descend_check(a: &StructureMapCurve) -> Result<DescendReport> {
    let connection = a.to_connection()?;
    let ricci_type = is_ricci_type(&connection)?.holds;
    let flat = curvature_curve(&connection)?.coeffs().iter().all(|r| r.is_zero());
    Ok(DescendReport { connection, ricci_type, flat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::int;
    use crate::invariant::rank_one_cube;

    fn sd4() -> SymplecticData {
        SymplecticData::standard(4).unwrap()
    }

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|&x| int(x)).collect()
    }

    fn ladder() -> StructureMapCurve {
        StructureMapCurve::ladder(sd4(), &[v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0])], &[
            vec![int(1), int(0)],
            vec![int(0), int(2)],
            vec![int(1), int(-1)],
        ])
        .unwrap()
    }

    #[test]
    fn validity() {
        assert_eq!(validity_check(&StructureMapCurve::zero(sd4(), 2)), None);
        assert_eq!(validity_check(&ladder()), None);
        let sd = sd4();
        let bad = rank_one_cube(&sd, &v(&[1, 0, 0, 0])).unwrap().add(&rank_one_cube(&sd, &v(&[0, 0, 1, 0])).unwrap());
        // A^{(1)}A^{(1)} first shows up at order 2.
        let curve = StructureMapCurve::new(sd, vec![Cube::zeros(4), bad, Cube::zeros(4)]).unwrap();
        assert!(matches!(validity_check(&curve), Some(ValidityWitness::ProductNonzero { order: 2, .. })));
    }

    #[test]
    fn generators_are_lattice_symplectic() {
        let sd = sd4();
        let gens = generators(&sd);
        assert_eq!(gens.len(), 22);
        for g in &gens {
            assert!(g.matrix().is_integral() && sd.preserves(g.matrix()));
        }
        assert!(LatticeSymplectic::from_rows(&sd, &[vec![2, 0, 0, 0], vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).is_err());
    }

    #[test]
    fn action_matches_endomorphism_formula() {
        let sd = sd4();
        let b = ladder();
        let c = word_element(&sd, &[0, 9, 20]).unwrap();
        let cb = sp_action(&c, &b).unwrap();
        for k in 0..=b.cap() {
            for a in 0..4 {
                // (C·B)(e_a) = C B(C⁻¹e_a) C⁻¹
                let cinv_ea: Vec<Rational> = (0..4).map(|i| c.inverse_matrix()[(i, a)].clone()).collect();
                let expected = c.matrix().mul(&b.cube(k).endo_at(&sd, &cinv_ea)).unwrap().mul(c.inverse_matrix()).unwrap();
                assert_eq!(cb.cube(k).endo(&sd, a), expected);
            }
        }
        assert_eq!(validity_check(&cb), None);
    }

    #[test]
    fn action_on_rank_one_moves_the_vector() {
        let sd = sd4();
        let c = word_element(&sd, &[2, 11]).unwrap();
        let s = rank_one_cube(&sd, &v(&[1, 2, 0, -1])).unwrap();
        let moved = c.matrix().mul_vec(&v(&[1, 2, 0, -1]));
        let curve = StructureMapCurve::new(sd.clone(), vec![Cube::zeros(4), s]).unwrap();
        assert_eq!(sp_action(&c, &curve).unwrap().cube(1), &rank_one_cube(&sd, &moved).unwrap());
    }

    #[test]
    fn group_action_laws() {
        let sd = sd4();
        let b = ladder();
        let c1 = word_element(&sd, &[3, 14]).unwrap();
        let c2 = word_element(&sd, &[21, 6]).unwrap();
        assert_eq!(sp_action(&LatticeSymplectic::identity(4), &b).unwrap(), b);
        let lhs = sp_action(&c1.mul(&c2).unwrap(), &b).unwrap();
        let rhs = sp_action(&c1, &sp_action(&c2, &b).unwrap()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(sp_action(&c1, &sp_action(&c1.inverse(), &b).unwrap()).unwrap(), b);
        assert_eq!(cheap_invariants(&lhs), cheap_invariants(&b));
    }

    #[test]
    fn plant_and_recover() {
        let sd = sd4();
        let a = ladder();
        assert!(matches!(equivalence_semidecide(&a, &a, 0).unwrap(), EquivalenceVerdict::Equivalent { ref word, .. } if word.is_empty()));
        let c = word_element(&sd, &[4, 12]).unwrap();
        let b = sp_action(&c, &a).unwrap();
        match equivalence_semidecide(&a, &b, 2).unwrap() {
            EquivalenceVerdict::Equivalent { witness, .. } => {
                let w = LatticeSymplectic::from_rows(&sd, &witness).unwrap();
                assert_eq!(sp_action(&w, &a).unwrap(), b);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn distinct_and_bound() {
        let sd = sd4();
        let a = ladder();
        let zero = StructureMapCurve::zero(sd.clone(), 3);
        assert!(matches!(
            equivalence_semidecide(&a, &zero, 2).unwrap(),
            EquivalenceVerdict::Distinct { ref invariant, .. } if invariant == "order_rank"
        ));
        // Scaling a rank-one cube by 2 keeps every rank but is not a lattice image within one step.
        let one = StructureMapCurve::ladder(sd.clone(), &[v(&[1, 0, 0, 0])], &[vec![int(1)]]).unwrap();
        let two = StructureMapCurve::ladder(sd, &[v(&[1, 0, 0, 0])], &[vec![int(2)]]).unwrap();
        assert!(matches!(equivalence_semidecide(&one, &two, 1).unwrap(), EquivalenceVerdict::NoWitnessWithinBound { bound: 1, .. }));
    }

    #[test]
    fn descends_to_flat_ricci_type() {
        let r = descend_check(&ladder()).unwrap();
        assert!(r.passed());
        assert!(r.connection.is_invariant());
        let zero = descend_check(&StructureMapCurve::zero(sd4(), 2)).unwrap();
        assert!(zero.passed() && zero.connection.is_flat_base_only());
        let sd = sd4();
        let bad = rank_one_cube(&sd, &v(&[1, 0, 0, 0])).unwrap().add(&rank_one_cube(&sd, &v(&[0, 0, 1, 0])).unwrap());
        let curve = StructureMapCurve::new(sd, vec![Cube::zeros(4), bad, Cube::zeros(4)]).unwrap();
        assert!(!descend_check(&curve).unwrap().passed());
    }
}
