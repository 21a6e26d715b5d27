//! Driver-level integration tests: the CLI binary, the report pipeline, and
//! property-based invariants of the serialization formats.

use std::process::Command as Process;

use num_complex::Complex64;
use proptest::prelude::*;

use harmonic_walk::domain::{Alphabet, FreqIndex, TargetFunction};
use harmonic_walk::estimators::EstimationRecord;
use harmonic_walk::fourier::{transform, Spectrum};
use harmonic_walk::learners::Hypothesis;
use harmonic_walk::report::{
    self, AlgorithmSpec, Command, ModelSpec, ResultPayload, RunConfig, TargetSpec,
};

fn ab(b: u8, n: usize) -> Alphabet {
    Alphabet::new(b, n).unwrap()
}

fn learn_config(seed: u64) -> RunConfig {
    RunConfig {
        command: Command::Learn,
        target: TargetSpec {
            class: Some("dnf".to_string()),
            b: Some(2),
            n: Some(6),
            terms: Some(2),
            width: Some(2),
            gen_seed: Some(3),
            ..Default::default()
        },
        model: ModelSpec {
            oracle: "crw".to_string(),
            rho: None,
            cycle: None,
        },
        algorithm: AlgorithmSpec {
            theta: Some(0.3),
            epsilon: Some(0.2),
            delta: Some(0.2),
            max_rounds: Some(4),
            ..Default::default()
        },
        estimate: None,
        experiment: None,
        seed,
        workers: 1,
    }
}

#[test]
fn parity_transform_is_a_single_unit_row() {
    let alphabet = ab(2, 8);
    let support = FreqIndex::unit(alphabet, 0, 1).unwrap();
    let f = TargetFunction::parity(alphabet, support.clone()).unwrap();
    let spectrum = transform(&f).unwrap();
    assert_eq!(spectrum.len(), 1);
    assert!((spectrum.get(&support) - Complex64::new(1.0, 0.0)).norm() <= 1e-12);
}

#[test]
fn different_seeds_change_only_stochastic_fields() {
    let dir = tempfile::tempdir().unwrap();
    let a = report::run(&learn_config(1), &dir.path().join("a")).unwrap();
    let b = report::run(&learn_config(2), &dir.path().join("b")).unwrap();
    // Comparison across seeds is well-formed; the command and target agree,
    // so any diffs concern stochastic results only.
    let diffs = report::compare(&a, &b, 1e-9).unwrap();
    for d in &diffs {
        assert!(
            !d.contains("command") && !d.contains("class"),
            "structural field differed across seeds: {d}"
        );
    }
}

#[test]
fn learning_failure_maps_to_exit_code_3() {
    let mut config = learn_config(7);
    // An unreachable error target with a one-round budget and a threshold
    // that filters out every coefficient forces a learning failure.
    config.algorithm.theta = Some(0.95);
    config.algorithm.epsilon = Some(0.01);
    config.algorithm.max_rounds = Some(1);
    let dir = tempfile::tempdir().unwrap();
    let outcome = report::run(&config, dir.path());
    let report = outcome.as_ref().unwrap();
    match &report.result {
        ResultPayload::Hypothesis { succeeded, .. } => assert!(!succeeded),
        other => panic!("unexpected payload {other:?}"),
    }
    assert_eq!(report::exit_code(&outcome), 3);
}

#[test]
fn config_error_maps_to_exit_code_2() {
    let mut config = learn_config(7);
    config.target.class = Some("sphere".to_string());
    let outcome = report::run(&config, tempfile::tempdir().unwrap().path());
    assert!(outcome.is_err());
    assert_eq!(report::exit_code(&outcome), 2);
}

#[test]
fn resource_error_maps_to_exit_code_4() {
    let outcome: harmonic_walk::Result<report::RunReport> =
        Err(harmonic_walk::Error::resource("budget exhausted"));
    assert_eq!(report::exit_code(&outcome), 4);
}

#[test]
fn estimation_record_round_trips() {
    let record = EstimationRecord {
        quantity: "prefix_energy".to_string(),
        params: serde_json::json!({"prefix": [1, 0, 1]}),
        estimate: 0.125,
        tolerance: 0.05,
        samples: 2952,
        wall_ms: 17.25,
    };
    let line = record.to_line().unwrap();
    let back = EstimationRecord::from_line(&line).unwrap();
    assert_eq!(back.to_line().unwrap(), line);
}

#[test]
fn cli_transform_and_compare_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    let config = RunConfig {
        command: Command::Transform,
        target: TargetSpec {
            class: Some("parity".to_string()),
            b: Some(2),
            n: Some(8),
            gen_seed: Some(1),
            ..Default::default()
        },
        ..learn_config(5)
    };
    std::fs::write(&config_path, config.to_json().unwrap()).unwrap();
    let bin = env!("CARGO_BIN_EXE_hwalk");
    let status = Process::new(bin)
        .args(["transform", "--config"])
        .arg(&config_path)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(dir.path().join("spectrum.csv").exists());
    let report_path = dir.path().join("report.json");
    assert!(report_path.exists());
    let status = Process::new(bin)
        .arg("compare")
        .arg(&report_path)
        .arg(&report_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
}

#[test]
fn cli_rejects_a_broken_config() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, "{\"command\": \"learn\"").unwrap();
    let status = Process::new(env!("CARGO_BIN_EXE_hwalk"))
        .args(["learn", "--config"])
        .arg(&config_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

// ---------------------------------------------------------------------------
// Property-based invariants
// ---------------------------------------------------------------------------

fn freq_strategy(b: u8, n: usize) -> impl Strategy<Value = Vec<u8>> {
    proptest::collection::vec(0..b, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn freq_negate_is_an_involution(digits in freq_strategy(3, 6)) {
        let alphabet = ab(3, 6);
        let a = FreqIndex::new(alphabet, digits).unwrap();
        prop_assert_eq!(a.negate(alphabet).negate(alphabet), a);
    }

    #[test]
    fn point_indexing_round_trips(idx in 0u64..6561) {
        let alphabet = ab(3, 8);
        let p = alphabet.point_at(idx);
        prop_assert_eq!(alphabet.index_of(p.digits()), idx);
    }

    #[test]
    fn spectrum_csv_round_trips(
        entries in proptest::collection::btree_map(
            freq_strategy(3, 4),
            (-1.0f64..1.0, -1.0f64..1.0),
            1..12,
        )
    ) {
        let alphabet = ab(3, 4);
        let mut spectrum = Spectrum::new(alphabet);
        for (digits, (re, im)) in entries {
            spectrum.insert(
                FreqIndex::new(alphabet, digits).unwrap(),
                Complex64::new(re, im),
            );
        }
        let mut csv = Vec::new();
        spectrum.write_csv(&mut csv).unwrap();
        let back = Spectrum::read_csv(alphabet, &String::from_utf8(csv).unwrap()).unwrap();
        prop_assert_eq!(back.len(), spectrum.len());
        for (a, c) in spectrum.iter() {
            prop_assert!((back.get(a) - c).norm() <= 1e-12);
        }
    }

    #[test]
    fn hypothesis_text_round_trips(
        entries in proptest::collection::btree_map(
            freq_strategy(2, 6),
            (-2.0f64..2.0, -2.0f64..2.0),
            1..10,
        )
    ) {
        let alphabet = ab(2, 6);
        let mut h = Hypothesis::new(alphabet);
        for (digits, (re, im)) in entries {
            h.add(
                FreqIndex::new(alphabet, digits).unwrap(),
                Complex64::new(re, im),
            );
        }
        let back = Hypothesis::from_text(&h.to_text()).unwrap();
        prop_assert_eq!(back.terms().len(), h.terms().len());
        for x in 0..64u64 {
            let p = alphabet.point_at(x);
            prop_assert_eq!(back.eval_digits(p.digits()), h.eval_digits(p.digits()));
        }
    }

    #[test]
    fn run_config_json_round_trips(seed in 0u64..1_000_000, workers in 1usize..8) {
        let mut config = learn_config(seed);
        config.workers = workers;
        let back = RunConfig::from_json(&config.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, config);
    }
}
