use std::collections::BTreeMap;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{json, Value};
use sympconn::curvature::{bianchi_check, extract_u_b, third_derivative, ConnectionCurve, CurvatureBundle};
use sympconn::exact::rational;
use sympconn::fourier::{SymplecticData, TensorField};
use sympconn::format::{Document, Payload, Provenance};
use sympconn::invariant::{flatness_theorem_check, StructureMapCurve};
use sympconn::laws::fixtures::{conjugated_flat, random_curve, random_ladder};
use sympconn::laws::FixtureSpec;
use sympconn::moduli::{cheap_invariants, descend_check, equivalence_semidecide, validity_check, EquivalenceVerdict};
use sympconn::normalization::normalize_curve;
use sympconn::symplecto::{HamiltonianSpec, SymplectoCurve};

use crate::funcspec::{parse_function, parse_vector};
use crate::io::{self, InputDigest};
use crate::report::Status;
use crate::{Failure, GenerateArgs, Kind};

#[derive(Default)]
pub struct Context {
    pub inputs: Vec<InputDigest>,
    /// A document was written to stdout, so the report must go elsewhere.
    pub stdout_taken: bool,
}

impl Context {
    fn load(&mut self, path: &Path) -> Result<Document, Failure> {
        let (doc, digest) = io::read_document(path)?;
        self.inputs.push(digest);
        Ok(doc)
    }
}

pub struct Outcome {
    pub status: Status,
    pub results: Value,
    pub summary: String,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report fragments always serialize")
}

fn provenance(command: &str, params: BTreeMap<String, String>) -> Provenance {
    Provenance { generator: format!("sympconn {command}"), version: env!("CARGO_PKG_VERSION").to_string(), params }
}

fn truncated(c: ConnectionCurve, order: Option<usize>) -> Result<ConnectionCurve, Failure> {
    match order {
        Some(k) if k > c.cap() => Err(Failure::Usage(format!("--order {k} exceeds the file's cap {}", c.cap()))),
        Some(k) => Ok(c.truncate(k)?),
        None => Ok(c),
    }
}

/// Loads a structure-map curve, accepting invariant connection curves too.
fn load_structure_map(ctx: &mut Context, path: &Path) -> Result<StructureMapCurve, Failure> {
    let doc = ctx.load(path)?;
    let res = match doc.payload {
        Payload::ConnectionCurve(_) => doc.connection().and_then(|c| StructureMapCurve::from_connection(&c)),
        _ => doc.structure_map(),
    };
    res.map_err(|e| Failure::in_file(path, e))
}

pub fn check(ctx: &mut Context, input: &Path, order: Option<usize>) -> Result<Outcome, Failure> {
    let doc = ctx.load(input)?;
    match doc.payload {
        Payload::StructureMapCurve(_) => {
            let b = doc.structure_map().map_err(|e| Failure::in_file(input, e))?;
            check_structure_map(b)
        }
        _ => {
            let c = doc.connection().map_err(|e| Failure::in_file(input, e))?;
            check_connection(truncated(c, order)?)
        }
    }
}

fn check_connection(c: ConnectionCurve) -> Result<Outcome, Failure> {
    c.sdata().require_theorem_dim()?;
    let bundle = CurvatureBundle::compute(&c)?;
    let decomposition = bundle.decomposition_rows(c.sdata())?;
    let bianchi = bianchi_check(&c)?;
    let ricci_type = bundle.ricci_type();
    let orders: Vec<Value> = (0..=c.cap())
        .map(|k| {
            json!({
                "order": k,
                "w_zero": bundle.w.coeff(k).is_zero(),
                "w_witness": bundle.w.coeff(k).first_nonzero(),
                "curvature_zero": bundle.r_full.coeff(k).is_zero(),
                "ricci_zero": bundle.ricci.coeff(k).is_zero(),
                "decomposition": to_value(&decomposition[k]),
                "bianchi": to_value(&bianchi[k]),
            })
        })
        .collect();
    let identities_hold = decomposition.iter().all(|r| r.passed()) && bianchi.iter().all(|r| r.passed());
    if !identities_hold {
        let results = json!({ "kind": "connection_curve", "dim": c.dim(), "cap": c.cap(), "orders": orders });
        return Ok(Outcome {
            status: Status::InternalError,
            results,
            summary: "an identity that holds for every connection curve failed".into(),
        });
    }
    let u_b = if ricci_type.holds {
        let ub = extract_u_b(&c)?;
        let per_order: Vec<Value> = (0..=c.cap())
            .map(|k| {
                json!({
                    "order": k,
                    "u_zero": ub.u.coeff(k).is_zero(),
                    "b_zero": ub.b.coeff(k).is_zero(),
                    "u_witness": ub.u.coeff(k).first_nonzero(),
                })
            })
            .collect();
        json!({ "orders": per_order, "residuals": to_value(&ub.residuals) })
    } else {
        Value::Null
    };
    let (status, summary) = match &ricci_type.first_failure {
        None => (Status::Pass, format!("Ricci type through order {}; Bianchi identities hold", c.cap())),
        Some(w) => (Status::Negative, format!("not of Ricci type: W ≠ 0 at order {} component {:?}", w.order, w.idx)),
    };
    let results = json!({
        "kind": "connection_curve",
        "dim": c.dim(),
        "cap": c.cap(),
        "invariant": c.is_invariant(),
        "ricci_type": to_value(&ricci_type),
        "orders": orders,
        "u_b": u_b,
    });
    Ok(Outcome { status, results, summary })
}

fn check_structure_map(b: StructureMapCurve) -> Result<Outcome, Failure> {
    b.sdata().require_theorem_dim()?;
    if let Some(w) = validity_check(&b) {
        let results = json!({ "kind": "structure_map_curve", "validity": to_value(&w) });
        return Ok(Outcome { status: Status::Negative, results, summary: format!("invalid structure map: {w:?}") });
    }
    let flatness = flatness_theorem_check(&b)?;
    let descend = descend_check(&b)?;
    let passed = flatness.passed() && descend.passed();
    let results = json!({
        "kind": "structure_map_curve",
        "dim": b.dim(),
        "cap": b.cap(),
        "validity": Value::Null,
        "flatness": to_value(&flatness),
        "torus": { "ricci_type": descend.ricci_type, "flat": descend.flat },
        "invariants": to_value(&cheap_invariants(&b)),
    });
    if !passed {
        return Ok(Outcome { status: Status::InternalError, results, summary: "valid curve failed the flatness theorem".into() });
    }
    Ok(Outcome { status: Status::Pass, results, summary: format!("valid flat invariant curve through order {}", b.cap()) })
}

pub fn normalize(ctx: &mut Context, input: &Path, order: Option<usize>, out: &Path, witness: &Path) -> Result<Outcome, Failure> {
    let doc = ctx.load(input)?;
    let c = truncated(doc.connection().map_err(|e| Failure::in_file(input, e))?, order)?;
    let res = normalize_curve(&c)?;
    // Independent re-check of the witness equation on the written objects.
    let pushed = res.witness.act_on_connection(&c)?;
    let witness_equation = pushed == res.flat.to_connection()?;
    let flatness = flatness_theorem_check(&res.flat)?;
    let input_flat = sympconn::curvature::curvature_curve(&c)?.coeffs().iter().all(TensorField::is_zero);
    let mut params = BTreeMap::new();
    params.insert("input_sha256".to_string(), ctx.inputs[0].sha256.clone());
    params.insert("order".to_string(), c.cap().to_string());
    let flat_doc = Document::new(Payload::StructureMapCurve(res.flat.to_doc()))
        .with_provenance(provenance("normalize", params.clone()));
    let witness_doc =
        Document::new(Payload::SymplectoCurve(res.witness.to_doc())).with_provenance(provenance("normalize", params));
    let results = json!({
        "cap": c.cap(),
        "steps": to_value(&res.log),
        "flat_zero": res.flat.is_zero(),
        "witness_equation": witness_equation,
        "flatness": to_value(&flatness),
        "input_curvature_zero": input_flat,
        "flat_sha256": io::sha256_hex(flat_doc.to_json().as_bytes()),
        "witness_sha256": io::sha256_hex(witness_doc.to_json().as_bytes()),
    });
    if !(witness_equation && flatness.passed() && input_flat) {
        return Ok(Outcome { status: Status::InternalError, results, summary: "normalization output failed re-verification".into() });
    }
    io::write_atomic(out, &flat_doc.to_json())?;
    io::write_atomic(witness, &witness_doc.to_json())?;
    Ok(Outcome {
        status: Status::Pass,
        results,
        summary: format!("normalized through order {}; witness·input = flat verified", c.cap()),
    })
}

fn symplectic_data(args: &GenerateArgs) -> Result<SymplecticData, Failure> {
    match &args.omega {
        None => Ok(SymplecticData::standard(args.dim)?),
        Some(path) => {
            let (text, _) = io::read_text(path)?;
            let rows: Vec<Vec<String>> = serde_json::from_str(&text)
                .map_err(|e| Failure::in_file(path, sympconn::Error::parse(format!("ω must be rows of rational strings: {e}"))))?;
            let sd = SymplecticData::from_doc(&rows).map_err(|e| Failure::in_file(path, e))?;
            if sd.dim() != args.dim {
                return Err(Failure::Usage(format!("ω has size {} but --dim is {}", sd.dim(), args.dim)));
            }
            Ok(sd)
        }
    }
}

fn require_f(args: &GenerateArgs, dim: usize) -> Result<sympconn::fourier::FourierScalar, Failure> {
    let kind = args.kind.to_possible_value().expect("no skipped variants");
    let src = args.f.as_deref().ok_or_else(|| Failure::Usage(format!("{} needs --f", kind.get_name())))?;
    Ok(parse_function(src, dim)?)
}

pub fn generate(ctx: &mut Context, args: &GenerateArgs) -> Result<Outcome, Failure> {
    let seeded = matches!(args.kind, Kind::Ladder | Kind::Fixture | Kind::RandomCurve);
    if seeded && args.omega.is_some() {
        return Err(Failure::Usage("seeded kinds use the standard ω; drop --omega".into()));
    }
    let sd = symplectic_data(args)?;
    let dim = sd.dim();
    let mut params = BTreeMap::new();
    let kind_name = args.kind.to_possible_value().expect("no skipped variants");
    params.insert("kind".to_string(), kind_name.get_name().to_string());
    params.insert("dim".to_string(), dim.to_string());
    if args.omega.is_some() {
        params.insert("omega".to_string(), to_value(&sd.to_doc()).to_string());
    }
    let e0 = || {
        let mut v = vec![rational::zero(); dim];
        v[0] = rational::one();
        v
    };
    let v = match &args.v {
        Some(s) => parse_vector(s, dim)?,
        None => e0(),
    };
    let cap = |default: usize| args.order.unwrap_or(default);
    let spec = |default_cap: usize| FixtureSpec::new(args.seed, dim, cap(default_cap));
    let structure = |b: StructureMapCurve| -> Result<Payload, Failure> {
        Ok(if args.connection {
            Payload::ConnectionCurve(b.to_connection()?.to_doc())
        } else {
            Payload::StructureMapCurve(b.to_doc())
        })
    };
    let payload = match args.kind {
        Kind::RankOne => {
            let k = cap(1);
            let coeffs: Vec<Vec<_>> =
                (1..=k).map(|j| vec![if j == 1 { rational::one() } else { rational::zero() }]).collect();
            params.insert("v".to_string(), v.iter().map(rational::to_string).collect::<Vec<_>>().join(","));
            params.insert("order".to_string(), k.to_string());
            structure(StructureMapCurve::ladder(sd, &[v], &coeffs)?)?
        }
        Kind::Ladder => {
            params.insert("seed".to_string(), args.seed.to_string());
            params.insert("order".to_string(), cap(3).to_string());
            structure(random_ladder(&spec(3))?)?
        }
        Kind::Fixture => {
            params.insert("seed".to_string(), args.seed.to_string());
            params.insert("order".to_string(), cap(3).to_string());
            Payload::ConnectionCurve(conjugated_flat(&spec(3))?.input.to_doc())
        }
        Kind::RandomCurve => {
            params.insert("seed".to_string(), args.seed.to_string());
            params.insert("order".to_string(), cap(2).to_string());
            Payload::ConnectionCurve(random_curve(&spec(2))?.to_doc())
        }
        Kind::Gradient => {
            let f = require_f(args, dim)?;
            let k = cap(args.at);
            if args.at == 0 || args.at > k {
                return Err(Failure::Usage(format!("--at {} outside 1..={k}", args.at)));
            }
            let mut orders = vec![TensorField::zeros(dim, 3); k];
            orders[args.at - 1] = third_derivative(&f);
            params.insert("f".to_string(), args.f.clone().unwrap_or_default());
            params.insert("at".to_string(), args.at.to_string());
            params.insert("order".to_string(), k.to_string());
            Payload::ConnectionCurve(ConnectionCurve::new(sd, orders)?.to_doc())
        }
        Kind::Conjugated => {
            let f = require_f(args, dim)?;
            let k = cap(2);
            let coeffs: Vec<Vec<_>> =
                (1..=k).map(|j| vec![if j == 1 { rational::one() } else { rational::zero() }]).collect();
            let flat = StructureMapCurve::ladder(sd.clone(), std::slice::from_ref(&v), &coeffs)?;
            let psi = SymplectoCurve::hamiltonian(sd, k, &HamiltonianSpec { f, order: args.at }, &rational::one())?;
            params.insert("v".to_string(), v.iter().map(rational::to_string).collect::<Vec<_>>().join(","));
            params.insert("f".to_string(), args.f.clone().unwrap_or_default());
            params.insert("at".to_string(), args.at.to_string());
            params.insert("order".to_string(), k.to_string());
            Payload::ConnectionCurve(psi.act_on_connection(&flat.to_connection()?)?.to_doc())
        }
        Kind::Hamiltonian => {
            let f = require_f(args, dim)?;
            let k = cap(args.at);
            params.insert("f".to_string(), args.f.clone().unwrap_or_default());
            params.insert("at".to_string(), args.at.to_string());
            params.insert("order".to_string(), k.to_string());
            let psi = SymplectoCurve::hamiltonian(sd, k, &HamiltonianSpec { f, order: args.at }, &rational::one())?;
            Payload::SymplectoCurve(psi.to_doc())
        }
    };
    let kind = payload.kind();
    let doc = Document::new(payload).with_provenance(provenance("generate", params));
    let text = doc.to_json();
    io::emit(args.out.as_deref(), &text)?;
    ctx.stdout_taken |= args.out.is_none();
    Ok(Outcome {
        status: Status::Pass,
        results: json!({ "kind": kind, "sha256": io::sha256_hex(text.as_bytes()) }),
        summary: format!("generated {kind}"),
    })
}

pub fn equiv(ctx: &mut Context, a: &Path, b: &Path, bound: usize) -> Result<Outcome, Failure> {
    let ca = load_structure_map(ctx, a)?;
    let cb = load_structure_map(ctx, b)?;
    let verdict = equivalence_semidecide(&ca, &cb, bound)?;
    let (status, summary) = match &verdict {
        EquivalenceVerdict::Equivalent { witness, word } => {
            (Status::Pass, format!("equivalent via C = {witness:?} (generator word {word:?})"))
        }
        EquivalenceVerdict::Distinct { invariant, left, right } => {
            (Status::Negative, format!("distinct: {invariant} {left:?} vs {right:?}"))
        }
        EquivalenceVerdict::NoWitnessWithinBound { bound, searched } => (
            Status::Negative,
            format!("undecided: no witness among {searched} elements of word length ≤ {bound}"),
        ),
    };
    Ok(Outcome { status, results: to_value(&verdict), summary })
}

pub fn act(ctx: &mut Context, psi: &Path, connection: &Path, out: Option<&Path>) -> Result<Outcome, Failure> {
    let p = ctx.load(psi)?.symplecto().map_err(|e| Failure::in_file(psi, e))?;
    let c = ctx.load(connection)?.connection().map_err(|e| Failure::in_file(connection, e))?;
    if p.cap() != c.cap() || p.sdata() != c.sdata() {
        return Err(Failure::Usage(format!(
            "symplectomorphism (dim {}, cap {}) and connection (dim {}, cap {}) do not match",
            p.dim(),
            p.cap(),
            c.dim(),
            c.cap()
        )));
    }
    let image = p.act_on_connection(&c)?;
    let mut params = BTreeMap::new();
    params.insert("psi_sha256".to_string(), ctx.inputs[0].sha256.clone());
    params.insert("connection_sha256".to_string(), ctx.inputs[1].sha256.clone());
    let doc = Document::new(Payload::ConnectionCurve(image.to_doc())).with_provenance(provenance("act", params));
    let text = doc.to_json();
    io::emit(out, &text)?;
    ctx.stdout_taken |= out.is_none();
    Ok(Outcome {
        status: Status::Pass,
        results: json!({ "cap": image.cap(), "invariant": image.is_invariant(), "sha256": io::sha256_hex(text.as_bytes()) }),
        summary: format!("applied symplectomorphism through order {}", image.cap()),
    })
}
