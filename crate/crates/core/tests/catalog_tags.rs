use finsler_core::catalog::{Tag, CATALOG, CORE_INSTANCES};
use finsler_core::verify::{run_check, tag_check, theorem_suite, CheckSpec, SamplePlan, TheoremId, VerifyError};

#[test]
fn every_tag_is_certified_by_its_check() {
    for entry in CATALOG {
        let bundle = entry.bundle().unwrap();
        let plan = SamplePlan::new(entry.id, 30, 11, entry.dimension);
        for tag in entry.tags {
            let spec = CheckSpec::new(tag_check(*tag)).unwrap();
            let r = run_check(&bundle, &spec, &plan).unwrap();
            assert!(r.pass, "{} {} max={:e}", entry.id, tag.name(), r.max);
        }
    }
}

#[test]
fn core_instances_are_shipped() {
    assert!(CATALOG.len() >= 5);
    for id in CORE_INSTANCES {
        assert!(CATALOG.iter().any(|e| e.id == id));
    }
}

#[test]
fn theorem_suites_on_parallel_instance() {
    let entry = CATALOG.iter().find(|e| e.id == "euclid_const_b").unwrap();
    let plan = SamplePlan::new(entry.id, 20, 3, 2);
    for theorem in [TheoremId::Theorem1, TheoremId::Prop5, TheoremId::Theorem3, TheoremId::Theorem4] {
        for r in theorem_suite(entry, theorem, &plan).unwrap() {
            assert!(r.pass, "{theorem} {} max={:e}", r.id, r.max);
        }
    }
}

#[test]
fn non_parallel_instance_yields_witnesses_for_theorem1() {
    let entry = CATALOG.iter().find(|e| e.id == "euclid_curl_b").unwrap();
    assert!(!entry.has(Tag::ParallelB));
    let plan = SamplePlan::new(entry.id, 20, 3, 2);
    for r in theorem_suite(entry, TheoremId::Theorem1, &plan).unwrap() {
        assert!(r.pass && r.witness.is_some(), "{} max={:e}", r.id, r.max);
    }
}

#[test]
fn missing_hypothesis_tags_are_reported() {
    let entry = CATALOG.iter().find(|e| e.id == "euclid_curl_b").unwrap();
    let plan = SamplePlan::new(entry.id, 5, 3, 2);
    assert!(matches!(
        theorem_suite(entry, TheoremId::Theorem6, &plan),
        Err(VerifyError::MissingTags { .. })
    ));
}
