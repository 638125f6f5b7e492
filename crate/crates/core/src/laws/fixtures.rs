//! Seeded fixture generators. Everything is a pure function of the spec, so a
//! printed spec reproduces a failure.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::ConnectionCurve;
use crate::error::Result;
use crate::exact::rational::{self, Rational};
use crate::fourier::{FourierScalar, SymplecticData, TensorField};
use crate::invariant::StructureMapCurve;
use crate::moduli::{generators, word_element, LatticeSymplectic};
use crate::symplecto::{HamiltonianSpec, SymplectoCurve};

/// Size limits for a fixture. Meaning per kind: for random curves,
/// `components` nonzero independent entries per order with up to
/// `modes` Fourier modes of sup-norm `≤ max_mode` each; for ladders,
/// `components` isotropic vectors; for conjugations, `modes` Hamiltonian
/// terms per step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub components: usize,
    pub modes: usize,
    pub max_mode: i64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { components: 3, modes: 3, max_mode: 2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FixtureSpec {
    pub seed: u64,
    pub dim: usize,
    pub cap: usize,
    pub budget: Budget,
}

impl FixtureSpec {
    pub fn new(seed: u64, dim: usize, cap: usize) -> Self {
        FixtureSpec { seed, dim, cap, budget: Budget::default() }
    }

    pub fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }

    pub fn sdata(&self) -> SymplecticData {
        SymplecticData::standard(self.dim).expect("even dimension")
    }

    /// Strictly smaller specs, most aggressive first.
    pub fn shrink_candidates(&self) -> Vec<FixtureSpec> {
        let mut out = Vec::new();
        let b = self.budget;
        if self.cap > 1 {
            out.push(FixtureSpec { cap: self.cap - 1, ..*self });
        }
        if b.components > 1 {
            out.push(FixtureSpec { budget: Budget { components: b.components - 1, ..b }, ..*self });
        }
        if b.modes > 1 {
            out.push(FixtureSpec { budget: Budget { modes: b.modes - 1, ..b }, ..*self });
        }
        if b.max_mode > 1 {
            out.push(FixtureSpec { budget: Budget { max_mode: b.max_mode - 1, ..b }, ..*self });
        }
        out
    }
}

fn small_rational(rng: &mut ChaCha8Rng) -> Rational {
    let mut p = rng.gen_range(-3..=3);
    if p == 0 {
        p = 1;
    }
    rational::rat(p, rng.gen_range(1..=3))
}

fn random_mode(rng: &mut ChaCha8Rng, dim: usize, max: i64) -> Vec<i64> {
    (0..dim).map(|_| rng.gen_range(-max..=max)).collect()
}

/// A real trigonometric polynomial with at most `modes` terms.
pub fn random_scalar(rng: &mut ChaCha8Rng, dim: usize, modes: usize, max_mode: i64) -> FourierScalar {
    let mut f = FourierScalar::zero(dim);
    for _ in 0..rng.gen_range(1..=modes.max(1)) {
        let m = random_mode(rng, dim, max_mode);
        let term = if rng.gen_bool(0.5) { FourierScalar::cos(&m) } else { FourierScalar::sin(&m) };
        f.add_scaled_assign(&term, &small_rational(rng));
    }
    f
}

/// Random symmetric `Ā⁽ᵏ⁾` for `k = 1..=cap`.
pub fn random_curve(spec: &FixtureSpec) -> Result<ConnectionCurve> {
    let mut rng = spec.rng(1);
    let dim = spec.dim;
    let mut triples = Vec::new();
    for a in 0..dim {
        for b in a..dim {
            for c in b..dim {
                triples.push([a, b, c]);
            }
        }
    }
    let orders = (1..=spec.cap)
        .map(|_| {
            let mut t = TensorField::zeros(dim, 3);
            for idx in triples.choose_multiple(&mut rng, spec.budget.components) {
                t.set(idx, random_scalar(&mut rng, dim, spec.budget.modes, spec.budget.max_mode));
            }
            t.symmetrize()
        })
        .collect();
    ConnectionCurve::new(spec.sdata(), orders)
}

/// Integer vectors spanning a random lattice Lagrangian: the image of
/// `span{e_0..e_{n-1}}` under a short random word.
fn lagrangian_basis(rng: &mut ChaCha8Rng, sd: &SymplecticData) -> Result<Vec<Vec<Rational>>> {
    let dim = sd.dim();
    let c = random_word(rng, sd, 2)?;
    Ok((0..dim / 2).map(|i| (0..dim).map(|r| c.matrix()[(r, i)].clone()).collect()).collect())
}

pub fn random_word(rng: &mut ChaCha8Rng, sd: &SymplecticData, max_len: usize) -> Result<LatticeSymplectic> {
    let n = generators(sd).len();
    let len = rng.gen_range(0..=max_len);
    let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
    word_element(sd, &word)
}

/// Sum of rank-one ladders on isotropic vectors: always a valid flat
/// invariant curve.
pub fn random_ladder(spec: &FixtureSpec) -> Result<StructureMapCurve> {
    let mut rng = spec.rng(2);
    let sd = spec.sdata();
    let basis = lagrangian_basis(&mut rng, &sd)?;
    let count = spec.budget.components.clamp(1, basis.len() + 1);
    let vs: Vec<Vec<Rational>> = (0..count)
        .map(|_| loop {
            let coeffs: Vec<i64> = basis.iter().map(|_| rng.gen_range(-1..=1)).collect();
            if coeffs.iter().any(|&c| c != 0) {
                break (0..sd.dim())
                    .map(|r| basis.iter().zip(&coeffs).map(|(b, &c)| &b[r] * rational::int(c)).sum())
                    .collect();
            }
        })
        .collect();
    let coeffs: Vec<Vec<Rational>> = (0..spec.cap)
        .map(|_| vs.iter().map(|_| if rng.gen_bool(0.25) { rational::zero() } else { small_rational(&mut rng) }).collect())
        .collect();
    StructureMapCurve::ladder(sd, &vs, &coeffs)
}

/// Single-vector ladder `Σ_k λ_k t^k S(v)`.
pub fn random_rank_one(spec: &FixtureSpec, salt: u64) -> Result<StructureMapCurve> {
    let mut rng = spec.rng(3 ^ salt);
    let sd = spec.sdata();
    let basis = lagrangian_basis(&mut rng, &sd)?;
    let v = basis.choose(&mut rng).expect("nonempty").clone();
    let coeffs: Vec<Vec<Rational>> = (0..spec.cap).map(|_| vec![small_rational(&mut rng)]).collect();
    StructureMapCurve::ladder(sd, &[v], &coeffs)
}

/// The Hamiltonians `cos x_0` and `sin(x_0 + x_1)`.
pub fn hamiltonian_basis(dim: usize) -> [FourierScalar; 2] {
    let mut m1 = vec![0; dim];
    m1[0] = 1;
    let mut m2 = m1.clone();
    m2[1] = 1;
    [FourierScalar::cos(&m1), FourierScalar::sin(&m2)]
}

/// A flat invariant curve conjugated by `ψ_{f₂}(t²) ∘ ψ_{f₁}(t)`, with each
/// `f_k` a rational combination of [`hamiltonian_basis`].
#[derive(Clone, Debug)]
pub struct ConjugatedFlat {
    pub flat: StructureMapCurve,
    pub psi: SymplectoCurve,
    pub input: ConnectionCurve,
}

pub fn conjugated_flat(spec: &FixtureSpec) -> Result<ConjugatedFlat> {
    let mut rng = spec.rng(4);
    let flat = random_ladder(spec)?;
    let sd = spec.sdata();
    let basis = hamiltonian_basis(spec.dim);
    let mut psi = SymplectoCurve::identity(sd.clone(), spec.cap);
    for k in 1..=spec.cap.min(2) {
        let mut f = FourierScalar::zero(spec.dim);
        let terms = spec.budget.modes.clamp(1, 2);
        for g in basis.choose_multiple(&mut rng, terms) {
            f.add_scaled_assign(g, &small_rational(&mut rng));
        }
        let step = SymplectoCurve::hamiltonian(sd.clone(), spec.cap, &HamiltonianSpec { f, order: k }, &rational::one())?;
        psi = step.compose(&psi)?;
    }
    let input = psi.act_on_connection(&flat.to_connection()?)?;
    Ok(ConjugatedFlat { flat, psi, input })
}

/// Random `ψ_{f₁}(t) ∘ ⋯ ∘ ψ_{f_K}(t^K)` with small Hamiltonians.
pub fn random_hamiltonian_product(spec: &FixtureSpec) -> Result<SymplectoCurve> {
    let mut rng = spec.rng(5);
    let sd = spec.sdata();
    let mut psi = SymplectoCurve::identity(sd.clone(), spec.cap);
    for k in 1..=spec.cap {
        let f = random_scalar(&mut rng, spec.dim, spec.budget.modes.min(2), spec.budget.max_mode.min(1));
        let step = SymplectoCurve::hamiltonian(sd.clone(), spec.cap, &HamiltonianSpec { f, order: k }, &rational::one())?;
        psi = psi.compose(&step)?;
    }
    Ok(psi)
}

pub fn random_rational(spec: &FixtureSpec, salt: u64) -> Rational {
    small_rational(&mut spec.rng(6 ^ salt))
}
