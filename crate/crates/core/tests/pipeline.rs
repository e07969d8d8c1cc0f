use skewnet::correspondence::{block_net, degenerate_net, random_regular_net, zero_extended_net, GenerateOptions};
use skewnet::ideals::HilbertConfig;
use skewnet::pipeline::{run_check, run_pipeline, PipelineOptions, PipelineReport, Status, CHECK_NAMES, SCHEMA_VERSION};
use skewnet::{ANet, Error, Field};

fn fixture(seed: u32) -> ANet {
    let path = format!("{}/tests/fixtures/v14_seed{seed}.json", env!("CARGO_MANIFEST_DIR"));
    ANet::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn quick() -> PipelineOptions {
    PipelineOptions { samples: 30, ..PipelineOptions::default() }
}

#[test]
fn smooth_fixture_runs_every_stage() {
    let r = run_pipeline(&fixture(1), &quick()).unwrap();
    assert_eq!(r.schema, SCHEMA_VERSION);
    assert_eq!(r.status, Status::Pass);
    assert!(r.halted.is_none());
    let names: Vec<&str> = r.stages.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, CHECK_NAMES);
    let back: PipelineReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn block_net_halts_at_regularity() {
    let r = run_pipeline(&block_net(2).unwrap(), &quick()).unwrap();
    assert_eq!(r.status, Status::Fail);
    assert!(r.halted.as_deref().unwrap().contains("not regular"));
    let reg = r.stage("regularity").unwrap();
    assert_eq!(reg.status, Status::Fail);
    assert!(!reg.witness.is_empty());
    assert!(r.stage("pfaffian").is_none());
}

#[test]
fn zero_extended_net_is_irregular() {
    let r = run_pipeline(&zero_extended_net(1).unwrap(), &quick()).unwrap();
    assert_eq!(r.stage("regularity").unwrap().status, Status::Fail);
    assert_eq!(r.status.exit_code(), 1);
}

#[test]
fn degenerate_net_has_matching_singular_sets() {
    let (net, _) = degenerate_net(1, &[2, 3], &HilbertConfig::default()).unwrap();
    let r = run_pipeline(&net, &quick()).unwrap();
    assert_eq!(r.stage("regularity").unwrap().status, Status::Pass);
    assert_eq!(r.stage("singularity-sets").unwrap().status, Status::Pass);
    assert_eq!(r.status, Status::Fail);
    assert!(r.halted.as_deref().unwrap().contains("not smooth"));
}

#[test]
fn degenerate_net_breaks_the_fiber_check() {
    let (net, _) = degenerate_net(1, &[2, 3], &HilbertConfig::default()).unwrap();
    let s = run_check(&net, "jw", &quick()).unwrap();
    assert_eq!(s.status, Status::Fail);
    assert!(s.witness.contains("singular point of X"), "{}", s.witness);
}

#[test]
fn other_shapes_skip_the_cubic_threefold_stages() {
    let g = random_regular_net(2, &GenerateOptions::shape(4, 4), &HilbertConfig::default()).unwrap();
    let r = run_pipeline(&g.net, &quick()).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(r.stage("theta-table").is_some());
    assert!(r.stage("charge2-table").is_none());
    let e = run_check(&g.net, "hilbert-C", &quick()).unwrap_err();
    assert!(matches!(e, Error::InvalidInput(_)));
}

#[test]
fn unknown_checks_and_bad_options_are_rejected() {
    let net = fixture(2);
    assert!(matches!(run_check(&net, "nope", &quick()), Err(Error::UnknownCheck(_))));
    let bad = PipelineOptions { prime: 32005, ..quick() };
    assert!(matches!(run_pipeline(&net, &bad), Err(Error::InvalidInput(_))));
    let same = PipelineOptions { alt_prime: 32003, ..quick() };
    assert!(run_check(&net, "pfaffian", &same).is_err());
}

#[test]
fn wider_field_list_is_reported() {
    let opts = PipelineOptions { fields: vec![Field::Prime(2), Field::extension(2, 2).unwrap()], ..quick() };
    let s = run_check(&fixture(5), "singularity-sets", &opts).unwrap();
    assert_eq!(s.status, Status::Pass);
    assert!(s.detail.to_string().contains("GF(2,2)"), "{}", s.detail);
}
