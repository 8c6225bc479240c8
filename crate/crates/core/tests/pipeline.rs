use std::collections::BTreeSet;

use tracelab::ensemble::{random_functions, rng, GenParams, InstanceKind};
use tracelab::linops::{MatrixFile, SelfAdjointOperator, UnitaryOperator};
use tracelab::runner::{
    exit_code, read_report, run_extract, run_gen, run_verify, write_report, RunConfig,
};
use tracelab::ssf::{read_json, verify, Instance, Theorem, VerifyOptions};
use tracelab::{Error, Settings};

#[test]
fn generated_matrices_feed_verification() {
    let dir = tempfile::tempdir().unwrap();
    let settings = Settings::default();
    let params = GenParams::default();
    let u_paths = run_gen(InstanceKind::Unitary, 4, 3, &params, &settings, dir.path()).unwrap();
    let a_paths = run_gen(
        InstanceKind::SelfadjointGenerator,
        4,
        3,
        &params,
        &settings,
        dir.path(),
    )
    .unwrap();
    let u0 =
        UnitaryOperator::new(MatrixFile::read(&u_paths[0]).unwrap(), settings.tol.class).unwrap();
    let a = SelfAdjointOperator::new(MatrixFile::read(&a_paths[0]).unwrap(), settings.tol.class)
        .unwrap();
    let functions = random_functions(&mut rng(9), 6, 8);
    let opts = VerifyOptions {
        n: 3,
        ..VerifyOptions::default()
    };
    let (report, ssf) = verify(
        Theorem::UnitaryMult,
        &Instance::Unitary { u0, a },
        &functions,
        &opts,
        &settings,
    )
    .unwrap();
    assert!(report.all_pass(), "max rel err {}", report.max_rel_err());
    assert_eq!(ssf.n, 3);
}

#[test]
fn extracted_data_survives_a_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    for theorem in [
        Theorem::UnitaryMult,
        Theorem::ContractionMult,
        Theorem::LinUnitary,
    ] {
        let path = dir.path().join(format!("{}.json", theorem.id()));
        let config = RunConfig {
            theorem,
            n: 3,
            seed: 4,
            out: Some(path.clone()),
            ..RunConfig::default()
        };
        let ssf = run_extract(&config).unwrap();
        let back = read_json(&path).unwrap();
        assert_eq!(back, ssf, "{theorem:?}");
        for f in random_functions(&mut rng(1), 6, 10) {
            let (a, b) = (
                ssf.predict_trace(&f).unwrap(),
                back.predict_trace(&f).unwrap(),
            );
            assert!((a - b).norm() <= 1e-14 * a.norm().max(1.0), "{theorem:?}");
        }
    }
}

#[test]
fn reports_roundtrip_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = RunConfig {
        theorem: Theorem::Helton,
        functions: 5,
        seed: 2,
        ..RunConfig::default()
    };
    let first = run_verify(&config).unwrap();
    let second = run_verify(&config).unwrap();
    assert_eq!(
        serde_json::to_string(&first).unwrap(),
        serde_json::to_string(&second).unwrap()
    );
    let path = dir.path().join("r.json");
    write_report(&first, &path).unwrap();
    let back = read_report(&path).unwrap();
    assert_eq!(
        serde_json::to_value(&back).unwrap(),
        serde_json::to_value(&first).unwrap()
    );
    assert_eq!(back.results.len(), 5);
}

#[test]
fn every_theorem_runs_from_defaults() {
    let ids: BTreeSet<&str> = Theorem::ALL
        .iter()
        .map(|&theorem| {
            let report = run_verify(&RunConfig {
                theorem,
                functions: 4,
                nodes: 512,
                delta: 1e-2,
                ..RunConfig::default()
            })
            .unwrap();
            assert_eq!(report.theorem, theorem);
            theorem.id()
        })
        .collect();
    assert_eq!(ids.len(), Theorem::ALL.len());
}

#[test]
fn errors_map_to_exit_codes() {
    let bad_n = run_verify(&RunConfig {
        n: 1,
        ..RunConfig::default()
    })
    .unwrap_err();
    assert!(matches!(bad_n, Error::InvalidConfig { field: "n", .. }));
    assert_eq!(exit_code(&bad_n), 2);
    let bad_depth = run_verify(&RunConfig {
        theorem: Theorem::ContractionMult,
        depth: Some(2),
        ..RunConfig::default()
    })
    .unwrap_err();
    assert_eq!(exit_code(&bad_depth), 2);
    let missing = read_report("/nonexistent/report.json").unwrap_err();
    assert_eq!(exit_code(&missing), 2);
}
