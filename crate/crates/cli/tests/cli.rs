mod common;

use common::{path, sympconn};
use sympconn::curvature::third_derivative;
use sympconn::exact::rational::int;
use sympconn::fourier::{FourierScalar, SymplecticData};
use sympconn::format::{Document, Payload};
use sympconn::invariant::StructureMapCurve;
use sympconn::laws::fixtures::random_ladder;
use sympconn::laws::FixtureSpec;
use sympconn::moduli::{sp_action, word_element, LatticeSymplectic};
use sympconn::symplecto::{HamiltonianSpec, SymplectoCurve};
use tempfile::TempDir;

fn read(dir: &TempDir, name: &str) -> Document {
    Document::parse(&std::fs::read_to_string(path(dir.path(), name)).unwrap()).unwrap()
}

#[test]
fn rank_one_generator_matches_hand_value() {
    let dir = TempDir::new().unwrap();
    let run = sympconn(dir.path(), &["generate", "rank-one", "--v", "1,0,0,0", "--out", "r.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let b = read(&dir, "r.json").structure_map().unwrap();
    assert_eq!(b.cube(1).get(2, 2, 2), &int(-1));
    assert_eq!(b.cube(1).entries().iter().filter(|x| *x != &int(0)).count(), 1);
    let doc = read(&dir, "r.json");
    assert_eq!(doc.provenance.unwrap().params["kind"], "rank-one");
}

#[test]
fn gradient_generator_and_normalization() {
    let dir = TempDir::new().unwrap();
    assert_eq!(sympconn(dir.path(), &["generate", "gradient", "--f", "cos(1,0,0,0)", "--out", "g.json"]).code, 0);
    let c = read(&dir, "g.json").connection().unwrap();
    let cos = FourierScalar::cos(&[1, 0, 0, 0]);
    assert_eq!(c.a_under(1), &third_derivative(&cos));

    let run = sympconn(dir.path(), &["normalize", "g.json", "--out", "flat.json", "--witness", "w.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rep = run.report();
    assert_eq!(rep["status"], "pass");
    assert_eq!(rep["results"]["witness_equation"], true);
    assert_eq!(rep["results"]["flat_zero"], true);
    assert!(read(&dir, "flat.json").structure_map().unwrap().is_zero());
    let sd = SymplecticData::standard(4).unwrap();
    let expected = SymplectoCurve::hamiltonian(sd, 1, &HamiltonianSpec { f: cos.neg(), order: 1 }, &int(1)).unwrap();
    assert_eq!(read(&dir, "w.json").symplecto().unwrap(), expected);
}

#[test]
fn embedded_rank_one_normalizes_with_identity_witness() {
    let dir = TempDir::new().unwrap();
    let args = ["generate", "rank-one", "--order", "3", "--connection", "--out", "r.json"];
    assert_eq!(sympconn(dir.path(), &args).code, 0);
    let run = sympconn(dir.path(), &["normalize", "r.json", "--out", "flat.json", "--witness", "w.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(read(&dir, "w.json").symplecto().unwrap().is_identity());
    let input = StructureMapCurve::from_connection(&read(&dir, "r.json").connection().unwrap()).unwrap();
    assert_eq!(read(&dir, "flat.json").structure_map().unwrap(), input);
}

#[test]
fn conjugated_fixture_is_ricci_type_with_vanishing_u_and_b() {
    let dir = TempDir::new().unwrap();
    let args = ["generate", "conjugated", "--f", "cos(1,0,0,0)", "--order", "2", "--out", "c.json"];
    assert_eq!(sympconn(dir.path(), &args).code, 0);
    let c = read(&dir, "c.json").connection().unwrap();
    assert!(!c.is_invariant());
    let run = sympconn(dir.path(), &["check", "c.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rep = run.report();
    assert_eq!(rep["results"]["ricci_type"]["holds"], true);
    for row in rep["results"]["u_b"]["orders"].as_array().unwrap() {
        assert_eq!(row["u_zero"], true);
        assert_eq!(row["b_zero"], true);
    }
    for row in rep["results"]["orders"].as_array().unwrap() {
        assert_eq!(row["bianchi"]["first"], true);
        assert_eq!(row["bianchi"]["second"], true);
    }
}

#[test]
fn flat_invariant_fixture_passes_all_checks() {
    let dir = TempDir::new().unwrap();
    assert_eq!(sympconn(dir.path(), &["generate", "ladder", "--seed", "4", "--out", "l.json"]).code, 0);
    let run = sympconn(dir.path(), &["check", "l.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.report()["results"]["flatness"]["curvature_zero"], true);
    let args = ["generate", "ladder", "--seed", "4", "--connection", "--out", "lc.json"];
    assert_eq!(sympconn(dir.path(), &args).code, 0);
    assert_eq!(sympconn(dir.path(), &["check", "lc.json"]).code, 0);
}

#[test]
fn equivalence_verdicts() {
    let dir = TempDir::new().unwrap();
    assert_eq!(sympconn(dir.path(), &["generate", "ladder", "--seed", "8", "--out", "a.json"]).code, 0);

    let run = sympconn(dir.path(), &["equiv", "a.json", "a.json"]);
    assert_eq!(run.code, 0);
    let rep = run.report();
    assert_eq!(rep["results"]["verdict"], "equivalent");
    assert_eq!(rep["results"]["word"].as_array().unwrap().len(), 0);

    let a = random_ladder(&FixtureSpec::new(8, 4, 3)).unwrap();
    let c = word_element(a.sdata(), &[3, 10]).unwrap();
    let planted = sp_action(&c, &a).unwrap();
    std::fs::write(path(dir.path(), "b.json"), Document::new(Payload::StructureMapCurve(planted.to_doc())).to_json()).unwrap();
    let run = sympconn(dir.path(), &["equiv", "a.json", "b.json", "--bound", "2"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let rows: Vec<Vec<i64>> = serde_json::from_value(run.report()["results"]["witness"].clone()).unwrap();
    let found = LatticeSymplectic::from_rows(a.sdata(), &rows).unwrap();
    assert_eq!(sp_action(&found, &a).unwrap(), planted);

    assert_eq!(sympconn(dir.path(), &["generate", "rank-one", "--order", "3", "--out", "r.json"]).code, 0);
    let run = sympconn(dir.path(), &["equiv", "a.json", "r.json"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report()["results"]["verdict"], "distinct");
}

#[test]
fn act_matches_library() {
    let dir = TempDir::new().unwrap();
    let gen = ["generate", "hamiltonian", "--f", "sin(1,1,0,0)", "--order", "2", "--out", "h.json"];
    assert_eq!(sympconn(dir.path(), &gen).code, 0);
    let gen = ["generate", "rank-one", "--order", "2", "--connection", "--out", "r.json"];
    assert_eq!(sympconn(dir.path(), &gen).code, 0);
    let run = sympconn(dir.path(), &["act", "h.json", "r.json", "--out", "out.json"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let psi = read(&dir, "h.json").symplecto().unwrap();
    let expected = psi.act_on_connection(&read(&dir, "r.json").connection().unwrap()).unwrap();
    assert_eq!(read(&dir, "out.json").connection().unwrap(), expected);
    assert_eq!(sympconn(dir.path(), &["check", "out.json"]).code, 0);
}

#[test]
fn reports_are_byte_identical_unless_timed() {
    let dir = TempDir::new().unwrap();
    assert_eq!(sympconn(dir.path(), &["generate", "fixture", "--seed", "2", "--out", "f.json"]).code, 0);
    let a = sympconn(dir.path(), &["check", "f.json"]);
    let b = sympconn(dir.path(), &["check", "f.json"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.contains("timing_ms"));
    let timed = sympconn(dir.path(), &["--timing", "check", "f.json"]);
    assert!(timed.report()["timing_ms"].is_u64());
}

#[test]
fn report_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let run = sympconn(dir.path(), &["generate", "rank-one", "--report", "rep.json"]);
    assert_eq!(run.code, 0);
    // The document went to stdout, the report to the file.
    assert!(Document::parse(&run.stdout).is_ok());
    let rep: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path(dir.path(), "rep.json")).unwrap()).unwrap();
    assert_eq!(rep["status"], "pass");
}

#[test]
fn custom_omega_is_carried_into_the_file() {
    let dir = TempDir::new().unwrap();
    // ω(e_0, e_1) = 1, ω(e_2, e_3) = 1.
    let omega = r#"[["0","1","0","0"],["-1","0","0","0"],["0","0","0","1"],["0","0","-1","0"]]"#;
    std::fs::write(path(dir.path(), "omega.json"), omega).unwrap();
    let args = ["generate", "rank-one", "--omega", "omega.json", "--connection", "--out", "r.json"];
    assert_eq!(sympconn(dir.path(), &args).code, 0);
    let c = read(&dir, "r.json").connection().unwrap();
    assert_eq!(c.sdata().lo(0, 1), &int(1));
    assert_eq!(sympconn(dir.path(), &["check", "r.json"]).code, 0);
    let bad = ["generate", "rank-one", "--omega", "omega.json", "--dim", "6"];
    assert_eq!(sympconn(dir.path(), &bad).code, 2);
}

#[test]
fn input_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(sympconn(dir.path(), &["check", "missing.json"]).code, 2);
    std::fs::write(path(dir.path(), "junk.json"), "{\"kind\": \"connection_curve\",\n \"dim\": 4,").unwrap();
    let run = sympconn(dir.path(), &["check", "junk.json"]);
    assert_eq!(run.code, 2);
    assert!(run.report()["error"].as_str().unwrap().contains("line 2"));
    std::fs::write(path(dir.path(), "kind.json"), r#"{"kind": "teapot"}"#).unwrap();
    assert_eq!(sympconn(dir.path(), &["check", "kind.json"]).code, 2);
    assert_eq!(sympconn(dir.path(), &["generate", "gradient"]).code, 2);
    assert_eq!(sympconn(dir.path(), &["generate", "gradient", "--f", "cos(1,0)"]).code, 2);
    assert_eq!(sympconn(dir.path(), &["frobnicate"]).code, 2);
    assert_eq!(sympconn(dir.path(), &["generate", "rank-one", "--dim", "2", "--out", "d2.json"]).code, 0);
    let run = sympconn(dir.path(), &["check", "d2.json"]);
    assert_eq!(run.code, 2);
    assert!(run.report()["error"].as_str().unwrap().contains("dimension at least 4"));
}

#[test]
fn structure_map_violating_products_is_rejected_with_identity() {
    let dir = TempDir::new().unwrap();
    let sd = SymplecticData::standard(4).unwrap();
    // S(e_0) + S(e_2) is symmetric but A(X)A(Y) ≠ 0 since ω(e_0, e_2) ≠ 0;
    // the product first shows up at order 2.
    let e = |i: usize| (0..4).map(|j| int((i == j) as i64)).collect::<Vec<_>>();
    let b = StructureMapCurve::ladder(sd, &[e(0), e(2)], &[vec![int(1), int(1)], vec![int(0), int(0)]]).unwrap();
    std::fs::write(path(dir.path(), "b.json"), Document::new(Payload::StructureMapCurve(b.to_doc())).to_json()).unwrap();
    let run = sympconn(dir.path(), &["check", "b.json"]);
    assert_eq!(run.code, 1);
    assert_eq!(run.report()["results"]["validity"]["identity"], "product_nonzero");
    let run = sympconn(dir.path(), &["equiv", "b.json", "b.json"]);
    assert_eq!(run.code, 1);
    assert!(run.report()["error"].as_str().unwrap().contains("ProductNonzero"));
}
