use sympconn::laws::{registry, run_all, run_law};

#[test]
fn registry_lists_eight_laws() {
    for law in registry() {
        println!("{law:?}");
    }
    assert_eq!(registry().len(), 8);
}

#[test]
fn all_laws_hold_on_six_seeds() {
    for out in run_all(6) {
        if let Some((orig, shrunk)) = &out.failure {
            panic!("{} failed on seed {}: {}\nshrunk to {:?}: {}", out.law, orig.spec.seed, orig.message, shrunk.spec, shrunk.message);
        }
        assert_eq!(out.fixtures, 6);
    }
}

#[test]
fn laws_are_seed_stable() {
    let law = registry().into_iter().find(|l| l.id == "L4").unwrap();
    let a = run_law(&law, 100..102);
    let b = run_law(&law, 100..102);
    assert_eq!(a.passed(), b.passed());
    assert!(a.passed());
}
