//! Parallel kernels against the forced-sequential path on the same inputs.
//! Build with `--no-default-features` to drop rayon entirely; both rows then
//! measure the sequential code.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sympconn::curvature::{curvature_curve, extract_u_b};
use sympconn::exec;
use sympconn::laws::fixtures::{conjugated_flat, random_curve, random_hamiltonian_product};
use sympconn::laws::FixtureSpec;
use sympconn::moduli::equivalence_semidecide;
use sympconn::normalization::normalize_curve;

fn both<F: Fn()>(c: &mut Criterion, group: &str, param: &str, f: F) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("parallel", param), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("sequential", param), |b| b.iter(|| exec::sequential(&f)));
    g.finish();
}

fn curvature(c: &mut Criterion) {
    for cap in [2, 3] {
        let curve = random_curve(&FixtureSpec::new(1, 4, cap)).unwrap();
        both(c, "curvature_curve", &format!("dim4_K{cap}"), || {
            black_box(curvature_curve(black_box(&curve)).unwrap());
        });
    }
}

fn action(c: &mut Criterion) {
    let spec = FixtureSpec::new(2, 4, 3);
    let psi = random_hamiltonian_product(&spec).unwrap();
    let conn = conjugated_flat(&spec).unwrap().flat.to_connection().unwrap();
    both(c, "act_on_connection", "dim4_K3", || {
        black_box(psi.act_on_connection(black_box(&conn)).unwrap());
    });
}

fn normalization(c: &mut Criterion) {
    let input = conjugated_flat(&FixtureSpec::new(3, 4, 3)).unwrap().input;
    both(c, "normalize_curve", "dim4_K3", || {
        black_box(normalize_curve(black_box(&input)).unwrap());
    });
    both(c, "extract_u_b", "dim4_K3", || {
        black_box(extract_u_b(black_box(&input)).unwrap());
    });
}

fn moduli(c: &mut Criterion) {
    let a = sympconn::laws::fixtures::random_ladder(&FixtureSpec::new(5, 4, 2)).unwrap();
    // A curve compared with a rescaled copy of itself passes every cheap
    // invariant, so the search exhausts the bound.
    let b = sympconn::invariant::StructureMapCurve::new(
        a.sdata().clone(),
        a.cubes().iter().map(|x| x.scale(&sympconn::exact::rational::int(2))).collect(),
    )
    .unwrap();
    both(c, "equivalence_semidecide", "dim4_L2", || {
        black_box(equivalence_semidecide(black_box(&a), black_box(&b), 2).unwrap());
    });
}

criterion_group!(kernels, curvature, action, normalization, moduli);
criterion_main!(kernels);
