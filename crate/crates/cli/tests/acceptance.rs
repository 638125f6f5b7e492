//! The acceptance gate. Every criterion runs at its stated threshold with
//! exact arithmetic and prints one PASS/FAIL line; the test fails if any
//! line is FAIL or exceeds its time budget.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::{path, sympconn};
use sympconn::curvature::{bianchi_check, curvature_curve, extract_u_b, is_ricci_type, ricci_curve, ConnectionCurve, CurvatureBundle};
use sympconn::euclidean::{equivalence_rn, psi_a, psi_at, verify_psi_a, verify_psi_at, FormalMap};
use sympconn::exact::rational::{int, rat};
use sympconn::fourier::{FourierScalar, TensorField};
use sympconn::format::Document;
use sympconn::invariant::{flatness_theorem_check, rank_one_cube, StructureMapCurve};
use sympconn::laws::fixtures::{conjugated_flat, random_curve, random_ladder, random_rank_one, random_word};
use sympconn::laws::FixtureSpec;
use sympconn::moduli::{equivalence_semidecide, sp_action, validity_check, EquivalenceVerdict, LatticeSymplectic};
use sympconn::normalization::normalize_curve;
use sympconn::Error;
use sympconn_cli::Failure;
use tempfile::TempDir;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn corpus() -> Vec<(u64, ConnectionCurve)> {
    (0..25).map(|s| (s, random_curve(&FixtureSpec::new(s, 4, 2)).expect("fixture builds"))).collect()
}

fn c1_decomposition() -> Outcome {
    let curves = corpus();
    for (seed, c) in &curves {
        let bundle = CurvatureBundle::compute(c).map_err(e)?;
        for row in bundle.decomposition_rows(c.sdata()).map_err(e)? {
            ensure(row.reconstruction && row.w_trace_free, || format!("seed {seed}: {row:?}"))?;
        }
    }
    Ok(format!("{} curves, dim 4, K = 2", curves.len()))
}

fn c2_bianchi() -> Outcome {
    let curves = corpus();
    for (seed, c) in &curves {
        for row in bianchi_check(c).map_err(e)? {
            ensure(row.passed(), || format!("seed {seed}: {row:?}"))?;
        }
    }
    Ok(format!("{} curves, both identities at orders 0..=2", curves.len()))
}

fn valid_structure_maps() -> Result<Vec<StructureMapCurve>, String> {
    let mut out = Vec::new();
    for dim in [4, 6] {
        for seed in 0..6 {
            out.push(random_ladder(&FixtureSpec::new(seed, dim, 3)).map_err(e)?);
            out.push(random_rank_one(&FixtureSpec::new(seed, dim, 3), 1).map_err(e)?);
        }
    }
    Ok(out)
}

fn c3_invariant_flatness() -> Outcome {
    let curves = valid_structure_maps()?;
    for (i, b) in curves.iter().enumerate() {
        ensure(validity_check(b).is_none(), || format!("fixture {i} is not valid"))?;
        let report = flatness_theorem_check(b).map_err(e)?;
        ensure(report.passed(), || format!("fixture {i} (dim {}): {report:?}", b.dim()))?;
    }
    Ok(format!("{} ladders and rank-one curves, dim 4 and 6, K = 3", curves.len()))
}

fn conjugated_fixtures() -> Result<Vec<(u64, ConnectionCurve)>, String> {
    (0..10).map(|s| Ok((s, conjugated_flat(&FixtureSpec::new(s, 4, 3)).map_err(e)?.input))).collect()
}

fn c4_round_trip() -> Outcome {
    let fixtures = conjugated_fixtures()?;
    for (seed, c) in &fixtures {
        ensure(!c.is_invariant(), || format!("seed {seed}: conjugation left the curve invariant"))?;
        let res = normalize_curve(c).map_err(|x| format!("seed {seed}: {x}"))?;
        let report = flatness_theorem_check(&res.flat).map_err(e)?;
        ensure(report.passed(), || format!("seed {seed}: output {report:?}"))?;
        let pushed = res.witness.act_on_connection(c).map_err(e)?;
        ensure(pushed == res.flat.to_connection().map_err(e)?, || format!("seed {seed}: witness·input ≠ output"))?;
        let r = curvature_curve(c).map_err(e)?;
        ensure((0..=3).all(|k| r.coeff(k).is_zero()), || format!("seed {seed}: input curvature nonzero"))?;
    }
    Ok(format!("{} conjugated flats, dim 4, K = 3", fixtures.len()))
}

fn c5_low_orders() -> Outcome {
    let mut fixtures: Vec<(String, ConnectionCurve)> =
        conjugated_fixtures()?.into_iter().map(|(s, c)| (format!("conjugated seed {s}"), c)).collect();
    for (i, b) in valid_structure_maps()?.into_iter().enumerate() {
        fixtures.push((format!("invariant {i}"), b.to_connection().map_err(e)?));
    }
    let cos = FourierScalar::cos(&[1, 0, 0, 0]);
    let sd = sympconn::fourier::SymplecticData::standard(4).map_err(e)?;
    let gradient = ConnectionCurve::new(sd, vec![sympconn::curvature::third_derivative(&cos), TensorField::zeros(4, 3)]).map_err(e)?;
    fixtures.push(("gradient cos x_0".into(), gradient));
    for (name, c) in &fixtures {
        ensure(is_ricci_type(c).map_err(e)?.holds, || format!("{name}: not Ricci type"))?;
        let ub = extract_u_b(c).map_err(|x| format!("{name}: {x}"))?;
        let r = curvature_curve(c).map_err(e)?;
        let ricci = ricci_curve(c).map_err(e)?;
        for k in 1..=2.min(c.cap()) {
            ensure(ub.u.coeff(k).is_zero(), || format!("{name}: u⁽{k}⁾ ≠ 0"))?;
            ensure(ub.b.coeff(k).is_zero(), || format!("{name}: b⁽{k}⁾ ≠ 0"))?;
            ensure(ricci.coeff(k).is_zero(), || format!("{name}: r⁽{k}⁾ ≠ 0"))?;
            ensure(r.coeff(k).is_zero(), || format!("{name}: R⁽{k}⁾ ≠ 0"))?;
        }
    }
    Ok(format!("{} Ricci-type fixtures", fixtures.len()))
}

fn c6_euclidean() -> Outcome {
    let mut pairs = 0;
    for seed in 0..10 {
        let a = random_ladder(&FixtureSpec::new(seed, 4, 3)).map_err(e)?;
        let b = random_ladder(&FixtureSpec::new(seed + 100, 4, 3)).map_err(e)?;
        let sd = a.sdata();
        for cube in [a.cube(1), b.cube(1)] {
            let psi = psi_a(sd, cube, 3).map_err(e)?;
            let report = verify_psi_a(sd, cube, &psi).map_err(e)?;
            ensure(report.passed(), || format!("seed {seed}: ψ^A {report:?}"))?;
            let id = FormalMap::identity(4, 3);
            ensure(psi.map().compose(psi.inverse_map()).map_err(e)? == id, || format!("seed {seed}: ψ^A∘(ψ^A)⁻¹ ≠ id"))?;
            ensure(psi.inverse_map().compose(psi.map()).map_err(e)? == id, || format!("seed {seed}: (ψ^A)⁻¹∘ψ^A ≠ id"))?;
            let (x, y) = (rat(2, 3), rat(-5, 7));
            let lhs = psi_a(sd, &cube.scale(&x), 3).map_err(e)?.compose(&psi_a(sd, &cube.scale(&y), 3).map_err(e)?).map_err(e)?;
            ensure(lhs == psi_a(sd, &cube.scale(&(&x + &y)), 3).map_err(e)?, || format!("seed {seed}: group law fails"))?;
        }
        for curve in [&a, &b] {
            let psi = psi_at(curve).map_err(e)?;
            let report = verify_psi_at(curve, &psi).map_err(e)?;
            ensure(report.passed(), || format!("seed {seed}: ψ_(A^t) {report:?}"))?;
        }
        equivalence_rn(&a, &b).map_err(|x| format!("seed {seed}: {x}"))?;
        pairs += 1;
    }
    // The closed form for the hand example v = e_0.
    let sd = sympconn::fourier::SymplecticData::standard(4).map_err(e)?;
    let cube = rank_one_cube(&sd, &[int(1), int(0), int(0), int(0)]).map_err(e)?;
    ensure(verify_psi_a(&sd, &cube, &psi_a(&sd, &cube, 3).map_err(e)?).map_err(e)?.passed(), || "S(e_0)".into())?;
    Ok(format!("{pairs} (A, B) pairs, dim 4, K = 3"))
}

fn c7_moduli() -> Outcome {
    let mut planted = 0;
    let mut distinct = 0;
    for seed in 0..12 {
        let spec = FixtureSpec::new(seed, 4, 2);
        let a = random_ladder(&spec).map_err(e)?;
        let c = random_word(&mut spec.rng(70), a.sdata(), 2).map_err(e)?;
        let ca = sp_action(&c, &a).map_err(e)?;
        match equivalence_semidecide(&a, &ca, 2).map_err(e)? {
            EquivalenceVerdict::Equivalent { witness, word } => {
                ensure(word.len() <= 2, || format!("seed {seed}: word {word:?} longer than the bound"))?;
                let found = LatticeSymplectic::from_rows(a.sdata(), &witness).map_err(e)?;
                ensure(sp_action(&found, &a).map_err(e)? == ca, || format!("seed {seed}: witness does not map A to C·A"))?;
                planted += 1;
            }
            other => return Err(format!("seed {seed}: planted word not recovered: {other:?}")),
        }
        // Dropping the order-1 cube keeps validity and changes its rank.
        if !a.cube(1).is_zero() {
            let mut cubes = a.cubes().to_vec();
            cubes[1] = sympconn::invariant::Cube::zeros(4);
            let b = StructureMapCurve::new(a.sdata().clone(), cubes).map_err(e)?;
            match equivalence_semidecide(&a, &b, 2).map_err(e)? {
                EquivalenceVerdict::Distinct { .. } => distinct += 1,
                other => return Err(format!("seed {seed}: rank-distinct pair not separated: {other:?}")),
            }
        }
    }
    ensure(planted >= 10 && distinct >= 10, || format!("only {planted} planted and {distinct} distinct pairs"))?;
    Ok(format!("{planted} planted pairs recovered, {distinct} rank-distinct pairs separated, L = 2"))
}

fn c8_negative_controls() -> Outcome {
    let dir = TempDir::new().map_err(e)?;
    let d = dir.path();
    let mut refused = 0;
    for seed in 0..3 {
        let name = format!("random{seed}.json");
        let run = sympconn(d, &["generate", "random-curve", "--seed", &seed.to_string(), "--out", &name]);
        ensure(run.code == 0, || run.stderr.clone())?;
        let c = Document::parse(&std::fs::read_to_string(path(d, &name)).map_err(e)?).map_err(e)?.connection().map_err(e)?;
        let expected = is_ricci_type(&c).map_err(e)?.first_failure.ok_or("random curve is Ricci type")?;
        let run = sympconn(d, &["normalize", &name, "--out", "x.json", "--witness", "y.json"]);
        ensure(run.code == 1, || format!("non-Ricci normalize exited {}", run.code))?;
        let rep = run.report();
        ensure(rep["results"]["first_failing_order"] == expected.order, || format!("reported {rep}, expected order {}", expected.order))?;
        ensure(rep["results"]["component"] == serde_json::json!(expected.idx), || format!("component mismatch: {rep}"))?;
        ensure(!path(d, "x.json").exists() && !path(d, "y.json").exists(), || "refusal wrote output files".into())?;
        refused += 1;
    }

    let run = sympconn(d, &["generate", "gradient", "--f", "cos(1,0,0,0)", "--out", "g.json"]);
    ensure(run.code == 0, || run.stderr.clone())?;
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(path(d, "g.json")).map_err(e)?).map_err(e)?;
    doc["A"][0]["entries"].as_array_mut().ok_or("no entries")?.push(serde_json::json!({
        "idx": [0, 1, 2],
        "modes": [{"m": [0, 0, 0, 0], "c": {"re": "1", "im": "0"}}]
    }));
    std::fs::write(path(d, "corrupt.json"), serde_json::to_string_pretty(&doc).map_err(e)?).map_err(e)?;
    for cmd in ["check", "normalize"] {
        let args: Vec<&str> = if cmd == "check" {
            vec!["check", "corrupt.json"]
        } else {
            vec!["normalize", "corrupt.json", "--out", "x.json", "--witness", "y.json"]
        };
        let run = sympconn(d, &args);
        ensure(run.code == 2, || format!("{cmd} on corrupted file exited {}", run.code))?;
        let msg = run.report()["error"].as_str().unwrap_or_default().to_string();
        ensure(msg.contains("parse error") && msg.contains("[0, 1, 2]"), || format!("{cmd}: unhelpful message {msg:?}"))?;
    }

    // Exit-code contract: 0 pass, 1 negative verdict, 2 input error, 3 internal.
    let codes = [
        ("check valid", sympconn(d, &["check", "g.json"]).code, 0),
        ("check non-Ricci", sympconn(d, &["check", "random0.json"]).code, 1),
        ("check missing file", sympconn(d, &["check", "nope.json"]).code, 2),
        ("bad flag", sympconn(d, &["check", "g.json", "--bogus"]).code, 2),
    ];
    for (what, got, want) in codes {
        ensure(got == want, || format!("{what}: exit {got}, expected {want}"))?;
    }
    let internal = Failure::Core(Error::internal("identity violated")).status().exit_code();
    ensure(internal == 3, || format!("internal assertion maps to {internal}"))?;
    let verdict = Failure::Core(Error::NotRicciType { order: 1, idx: vec![0, 1, 0, 0] }).status().exit_code();
    ensure(verdict == 1, || format!("NotRicciType maps to {verdict}"))?;
    Ok(format!("{refused} refusals with first failing order, corrupted file rejected at parse, exit codes 0/1/2/3"))
}

#[test]
fn acceptance_criteria() {
    type Criterion = (&'static str, u64, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("1 decomposition R = E + W, trace-free W", 60, c1_decomposition),
        ("2 Bianchi identities", 60, c2_bianchi),
        ("3 invariant flatness theorem", 30, c3_invariant_flatness),
        ("4 normalization round trip", 300, c4_round_trip),
        ("5 order-1/2 vanishing", 30, c5_low_orders),
        ("6 Euclidean constructions", 30, c6_euclidean),
        ("7 moduli plant and recover", 120, c7_moduli),
        ("8 negative controls", 10, c8_negative_controls),
    ];
    let mut failures = Vec::new();
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let line = match &outcome {
            Ok(detail) if took <= Duration::from_secs(limit) => format!("PASS criterion {name}: {detail} ({took:.1?} ≤ {limit} s)"),
            Ok(detail) => format!("FAIL criterion {name}: {detail} but took {took:.1?} > {limit} s"),
            Err(msg) => format!("FAIL criterion {name}: {msg} ({took:.1?})"),
        };
        // Written to the stdout handle rather than through `println!` so the
        // line survives libtest's output capture.
        let _ = writeln!(std::io::stdout().lock(), "{line}");
        if line.starts_with("FAIL") {
            failures.push(line);
        }
    }
    assert!(failures.is_empty(), "{} criteria failed:\n{}", failures.len(), failures.join("\n"));
}
