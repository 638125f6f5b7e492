//! The flat picture on `ℝ^{2n}`: polynomial maps, the explicit
//! symplectomorphisms `ψ^A` and `ψ_{A^t}`, and the stabilizer of `∇⁰`.

mod model;
pub mod poly;

pub use model::{
    equivalence_rn, generator_field, psi_a, psi_at, require_valid_curve, stabilizer_check, verify_psi_a,
    verify_psi_at, AffineNormalForm, FlowReport, FormalMap, FormalSymplecto, PolyConnection, PolyMapDoc,
    PolyVectorField, PsiReport, StabilizerVerdict,
};
pub use poly::{Poly, PolyDoc, Trunc};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::{int, rat, Rational};
    use crate::fourier::SymplecticData;
    use crate::invariant::{rank_one_cube, Cube, StructureMapCurve};
    use crate::linalg::RatMatrix;

    fn sd4() -> SymplecticData {
        SymplecticData::standard(4).unwrap()
    }

    fn e(i: usize) -> Vec<Rational> {
        (0..4).map(|j| int((i == j) as i64)).collect()
    }

    #[test]
    fn psi_a_rank_one_closed_form() {
        let sd = sd4();
        let a = rank_one_cube(&sd, &e(0)).unwrap();
        let psi = psi_a(&sd, &a, 0).unwrap();
        // A(e_2)e_2 = −e_0 is the only nonzero product, so ψ(x) = x + ½(x_2)² e_0.
        let x2 = Poly::var(5, 2);
        let expected0 = Poly::var(5, 0).add(&x2.mul(&x2, None).scale(&rat(1, 2)));
        assert_eq!(psi.map().comps()[0], expected0);
        for i in 1..4 {
            assert_eq!(psi.map().comps()[i], Poly::var(5, i));
        }
        assert!(verify_psi_a(&sd, &a, &psi).unwrap().passed());
    }

    #[test]
    fn psi_a_zero_and_inverse() {
        let sd = sd4();
        let zero = psi_a(&sd, &Cube::zeros(4), 0).unwrap();
        assert_eq!(zero, FormalSymplecto::identity(sd.clone(), 0));
        let a = rank_one_cube(&sd, &[int(1), int(2), int(0), int(-1)]).unwrap();
        let p = psi_a(&sd, &a, 0).unwrap();
        let m = psi_a(&sd, &a.scale(&int(-1)), 0).unwrap();
        assert_eq!(m.compose(&p).unwrap(), FormalSymplecto::identity(sd, 0));
    }

    #[test]
    fn psi_a_one_parameter_group() {
        let sd = sd4();
        let a = rank_one_cube(&sd, &e(1)).unwrap().add(&rank_one_cube(&sd, &[int(1), int(1), int(0), int(0)]).unwrap());
        let p = |r: Rational| psi_a(&sd, &a.scale(&r), 0).unwrap();
        assert_eq!(p(rat(1, 3)).compose(&p(rat(-5, 2))).unwrap(), p(rat(1, 3) + rat(-5, 2)));
    }

    #[test]
    fn psi_a_rejects_non_nilpotent() {
        let sd = sd4();
        let bad = rank_one_cube(&sd, &e(0)).unwrap().add(&rank_one_cube(&sd, &e(2)).unwrap());
        assert!(matches!(psi_a(&sd, &bad, 0), Err(crate::Error::Precondition(_))));
    }

    #[test]
    fn flow_matches_closed_form() {
        let sd = sd4();
        let a = rank_one_cube(&sd, &[int(1), int(0), int(1), int(0)]).unwrap();
        let curve = StructureMapCurve::new(sd.clone(), vec![Cube::zeros(4), a.clone()]).unwrap();
        let flow = psi_at(&curve).unwrap();
        assert!(verify_psi_at(&curve, &flow).unwrap().passed());
        // At t = 1 the order-1 coefficient is −½A(x)x, the closed form minus x.
        let closed = psi_a(&sd, &a, 1).unwrap();
        for i in 0..4 {
            let at_one = flow.map().order(0)[i].add(&flow.map().order(1)[i]);
            let closed_sum = closed.map().order(0)[i].clone();
            assert_eq!(at_one, closed_sum);
        }
    }

    #[test]
    fn flow_of_ladder_curve() {
        let sd = sd4();
        let curve =
            StructureMapCurve::ladder(sd.clone(), &[e(0), e(1)], &[vec![int(1), int(0)], vec![int(2), int(-1)], vec![rat(1, 2), int(3)]])
                .unwrap();
        let flow = psi_at(&curve).unwrap();
        assert!(verify_psi_at(&curve, &flow).unwrap().passed());
        assert!(psi_at(&StructureMapCurve::zero(sd.clone(), 3)).unwrap() == FormalSymplecto::identity(sd, 3));
    }

    #[test]
    fn equivalence_between_ladders() {
        let sd = sd4();
        let a = StructureMapCurve::ladder(sd.clone(), &[e(0)], &[vec![int(1)], vec![int(0)], vec![int(2)]]).unwrap();
        let b = StructureMapCurve::ladder(sd.clone(), &[e(1), e(0)], &[vec![int(1), int(0)], vec![int(1), int(1)], vec![int(0), int(-1)]])
            .unwrap();
        let psi = equivalence_rn(&a, &b).unwrap();
        assert_eq!(psi.map().order(0), FormalMap::identity(4, 3).order(0));
        let same = equivalence_rn(&a, &a).unwrap();
        assert_eq!(same, FormalSymplecto::identity(sd.clone(), 3));
        let zero = StructureMapCurve::zero(sd.clone(), 3);
        assert_eq!(equivalence_rn(&zero, &b).unwrap(), psi_at(&b).unwrap());
    }

    #[test]
    fn stabilizer_of_linear_map() {
        let sd = sd4();
        // (x_0, x_2) shear: x_0 ↦ x_0 + x_2 keeps the standard form.
        let c = RatMatrix::from_i64_rows(&[&[1, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]).unwrap();
        assert!(sd.preserves(&c));
        let psi = FormalSymplecto::affine(sd.clone(), &c, &[rat(1, 2), int(0), int(0), int(3)], 2).unwrap();
        match stabilizer_check(&psi).unwrap() {
            StabilizerVerdict::Fixes(nf) => {
                assert_eq!(nf.c, c);
                assert_eq!(nf.d, vec![rat(1, 2), int(0), int(0), int(3)]);
                assert!(nf.c_t.iter().all(RatMatrix::is_zero));
                assert!(nf.d_t.iter().all(|v| v.iter().all(|x| *x == int(0))));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn stabilizer_recovers_affine_generator() {
        let sd = sd4();
        let l = RatMatrix::from_i64_rows(&[&[0, 0, 1, 0], &[0, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]).unwrap();
        let l2 = RatMatrix::from_i64_rows(&[&[1, 0, 0, 0], &[0, 0, 0, 0], &[0, 0, -1, 0], &[0, 0, 0, 0]]).unwrap();
        let c_t = vec![l, l2, RatMatrix::zeros(4, 4)];
        let d_t = vec![e(1), vec![int(0); 4], e(3)];
        let flow = FormalSymplecto::from_flow(sd.clone(), &PolyVectorField::affine_curve(&c_t, &d_t).unwrap()).unwrap();
        match stabilizer_check(&flow).unwrap() {
            StabilizerVerdict::Fixes(nf) => {
                assert_eq!(nf.c, RatMatrix::identity(4));
                assert_eq!(nf.c_t, c_t);
                assert_eq!(nf.d_t, d_t);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn stabilizer_rejects_psi_a() {
        let sd = sd4();
        let a = rank_one_cube(&sd, &e(0)).unwrap();
        let psi = psi_a(&sd, &a, 1).unwrap();
        assert!(matches!(stabilizer_check(&psi).unwrap(), StabilizerVerdict::Moves { order: 0, .. }));
        let curve = StructureMapCurve::new(sd.clone(), vec![Cube::zeros(4), a]).unwrap();
        assert!(matches!(stabilizer_check(&psi_at(&curve).unwrap()).unwrap(), StabilizerVerdict::Moves { order: 1, .. }));
    }

    #[test]
    fn map_doc_round_trip() {
        let sd = sd4();
        let curve = StructureMapCurve::ladder(sd, &[e(0)], &[vec![int(1)], vec![int(1)]]).unwrap();
        let map = psi_at(&curve).unwrap().map().clone();
        let json = serde_json::to_string(&map.to_doc()).unwrap();
        assert_eq!(FormalMap::from_doc(&serde_json::from_str(&json).unwrap()).unwrap(), map);
    }
}
