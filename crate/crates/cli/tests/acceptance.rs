//! Acceptance gate for the whole workspace. Each test prints one line,
//! `acceptance: <criterion>: PASS` or `SKIP (reason)`, and the criteria
//! that need the canonical survey file skip with a notice when it is not
//! installed. Run with `--nocapture` to see every line:
//!
//! ```text
//! cargo test -p pulsar-vqc-cli --test acceptance -- --nocapture
//! ```
//!
//! Stated runtime budgets assume an optimized build; they are printed
//! everywhere and enforced only under `--release`.

use std::f64::consts::PI;
use std::time::Instant;

use pulsar_vqc::circuits::{efficient_su2, real_amplitudes, EntanglementScheme, PauliString};
use pulsar_vqc::dataio::{boxplot_stats, load_csv, verify_canonical, Dataset};
use pulsar_vqc::featselect::{rank, SelectionMethod};
use pulsar_vqc::metrics::{report, ConfusionCounts};
use pulsar_vqc::simulator::Statevector;
use pulsar_vqc::vqc::{AnsatzKind, FeatureMapKind, ModelSpec, VqcModel};
use pulsar_vqc_cli::{run_experiment, run_grid, ConfigValues, ExperimentConfig};
use pulsar_vqc_testkit::{dense, fd_gradient, fixture_csv, htru_csv, random_circuit, rows};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SCHEMES: [EntanglementScheme; 3] = [
    EntanglementScheme::Linear,
    EntanglementScheme::Circular,
    EntanglementScheme::Full,
];

fn finish(name: &str, clock: Instant, budget_seconds: f64) {
    let elapsed = clock.elapsed().as_secs_f64();
    println!("acceptance: {name}: PASS ({elapsed:.2}s, budget {budget_seconds:.0}s)");
    #[cfg(not(debug_assertions))]
    assert!(
        elapsed < budget_seconds,
        "{name} took {elapsed:.2}s, budget {budget_seconds:.0}s"
    );
}

fn skip(name: &str, reason: &str) {
    println!("acceptance: {name}: SKIP ({reason})");
}

fn canonical_dataset(name: &str) -> Option<Dataset> {
    let Some(path) = htru_csv() else {
        skip(
            name,
            "canonical dataset not present; place HTRU_2.csv in data/ or set PULSAR_VQC_DATA",
        );
        return None;
    };
    let dataset = load_csv(&path).expect("canonical dataset loads");
    verify_canonical(&dataset).expect("canonical dataset shape");
    Some(dataset)
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Every confusion matrix with at most `max_total` samples whose five
/// metrics round to the given targets. Built directly from the metric
/// definitions, independently of the `metrics` module.
fn matching_matrices(targets: [f64; 5], max_total: u64) -> Vec<(u64, u64, u64, u64)> {
    let [accuracy, precision, recall, f1, mcc] = targets;
    let rounds_to = |value: f64, target: f64| (round3(value) - target).abs() < 1e-9;
    let mut found = Vec::new();
    for tp in 0..=max_total {
        for fp in 0..=(max_total - tp) {
            let p = tp as f64 / (tp + fp) as f64;
            if tp + fp == 0 || !rounds_to(p, precision) {
                continue;
            }
            for fn_ in 0..=(max_total - tp - fp) {
                let r = tp as f64 / (tp + fn_) as f64;
                if tp + fn_ == 0 || !rounds_to(r, recall) {
                    continue;
                }
                if !rounds_to(2.0 * p * r / (p + r), f1) {
                    continue;
                }
                for tn in 0..=(max_total - tp - fp - fn_) {
                    let total = (tp + fp + fn_ + tn) as f64;
                    if !rounds_to((tp + tn) as f64 / total, accuracy) {
                        continue;
                    }
                    let denominator = ((tp + fp) * (tp + fn_) * (tn + fp) * (tn + fn_)) as f64;
                    let m = if denominator == 0.0 {
                        0.0
                    } else {
                        ((tp * tn) as f64 - (fp * fn_) as f64) / denominator.sqrt()
                    };
                    if rounds_to(m, mcc) {
                        found.push((tp, fp, fn_, tn));
                    }
                }
            }
        }
    }
    found
}

#[test]
fn metric_fidelity() {
    let name = "metric fidelity";
    let clock = Instant::now();
    let cases = [
        ([0.945, 0.476, 1.000, 0.645, 0.670], (10, 11, 0, 179)),
        ([0.950, 0.375, 0.750, 0.500, 0.509], (3, 5, 1, 111)),
    ];
    for (targets, counts) in cases {
        let matches = matching_matrices(targets, 400);
        assert!(
            matches.contains(&counts),
            "published counts {counts:?} do not reproduce {targets:?}"
        );
        // The metrics are scale-invariant and accuracy rounding tolerates a
        // one-off true-negative change, so uniqueness only holds once the
        // matrix total is pinned to the published test-set size.
        let test_size = counts.0 + counts.1 + counts.2 + counts.3;
        let at_size: Vec<_> = matches
            .iter()
            .filter(|m| m.0 + m.1 + m.2 + m.3 == test_size)
            .collect();
        assert_eq!(
            at_size,
            vec![&counts],
            "inversion at test size {test_size} is not unique for {targets:?}"
        );

        let (tp, fp, fn_, tn) = counts;
        let scores = report(&ConfusionCounts::new(tp, fp, fn_, tn)).unwrap();
        let produced = [
            scores.accuracy,
            scores.precision,
            scores.recall,
            scores.f1,
            scores.mcc,
        ];
        for (value, target) in produced.iter().zip(targets) {
            assert!(
                (round3(*value) - target).abs() < 1e-9,
                "{counts:?}: got {produced:?}, expected {targets:?}"
            );
        }
    }
    finish(name, clock, 1.0);
}

#[test]
fn feature_ranking_fidelity() {
    let name = "feature-ranking fidelity";
    let clock = Instant::now();

    let fixture = load_csv(fixture_csv()).unwrap();
    let fixture_order = |method: SelectionMethod| -> Vec<String> {
        rank(
            fixture.features.view(),
            &fixture.labels,
            &fixture.feature_names,
            method,
        )
        .unwrap()
        .features
        .into_iter()
        .map(|f| f.name)
        .collect()
    };
    assert_eq!(
        fixture_order(SelectionMethod::Fs1),
        fixture_order(SelectionMethod::Fs2),
        "rankings disagree on the synthetic fixture"
    );

    let Some(dataset) = canonical_dataset(name) else {
        return;
    };
    let order = |method: SelectionMethod| -> Vec<String> {
        rank(
            dataset.features.view(),
            &dataset.labels,
            &dataset.feature_names,
            method,
        )
        .unwrap()
        .features
        .into_iter()
        .map(|f| f.name)
        .collect()
    };
    let expected_fs1 = [
        "Prof-mu", "Prof-s", "Prof-k", "DM-mu", "DM-sigma", "DM-s", "DM-k", "Prof-sigma",
    ];
    let expected_fs2 = [
        "Prof-s", "Prof-k", "Prof-mu", "DM-sigma", "DM-mu", "DM-s", "Prof-sigma", "DM-k",
    ];
    assert_eq!(order(SelectionMethod::Fs1), expected_fs1);
    assert_eq!(order(SelectionMethod::Fs2), expected_fs2);
    finish(name, clock, 5.0);
}

#[test]
fn simulator_oracle_equivalence() {
    let name = "simulator oracle equivalence";
    let clock = Instant::now();
    for case in 0..200u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let n_qubits = 1 + (case as usize % 3);
        let gates = random_circuit(&mut rng, n_qubits, 30);
        let mut state = Statevector::zero(n_qubits).unwrap();
        state.apply_all(&gates).unwrap();
        let reference = dense::evolve(n_qubits, &gates);
        for (index, (a, b)) in state.amplitudes().iter().zip(&reference).enumerate() {
            assert!(
                (a - b).norm() < 1e-10,
                "case {case}, amplitude {index}: {a} vs {b}"
            );
        }
    }
    finish(name, clock, 10.0);
}

fn random_model(case: u64) -> (VqcModel, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(9000 + case);
    let n_qubits = rng.random_range(2..=4);
    let reps = rng.random_range(1..=2);
    let entanglement = SCHEMES[rng.random_range(0..SCHEMES.len())];
    let pauli = || {
        FeatureMapKind::Pauli(vec![
            "z".parse::<PauliString>().unwrap(),
            "xy".parse::<PauliString>().unwrap(),
        ])
    };
    let (feature_map, ansatz) = match case % 4 {
        0 => (FeatureMapKind::Zz, AnsatzKind::RealAmplitudes),
        1 => (pauli(), AnsatzKind::EfficientSu2),
        2 => (FeatureMapKind::Zz, AnsatzKind::FeatureMapAsAnsatz(FeatureMapKind::Zz)),
        _ => (FeatureMapKind::Zz, AnsatzKind::FeatureMapAsAnsatz(pauli())),
    };
    let spec = ModelSpec {
        n_qubits,
        reps,
        entanglement,
        feature_map,
        ansatz,
    };
    let mut model = VqcModel::new(spec).unwrap();
    let weights: Vec<f64> = (0..model.num_weights())
        .map(|_| rng.random_range(-PI..PI))
        .collect();
    model.set_weights(weights).unwrap();
    (model, rng)
}

#[test]
fn gradient_correctness() {
    let name = "gradient correctness";
    let clock = Instant::now();
    for case in 0..50u64 {
        let (model, mut rng) = random_model(case);
        let n = model.n_qubits();
        let data: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..n).map(|_| rng.random_range(0.1..PI - 0.1)).collect())
            .collect();
        let views: Vec<&[f64]> = data.iter().map(|row| row.as_slice()).collect();
        let features = rows(&views);
        let labels: Vec<u8> = (0..3).map(|i| (i % 2) as u8).collect();

        let analytic = model.loss_gradient(features.view(), &labels).unwrap();
        let numeric = fd_gradient(&model, features.view(), &labels, 1e-5);
        for (k, (a, f)) in analytic.iter().zip(&numeric).enumerate() {
            let tolerance = (1e-4 * f.abs()).max(1e-7);
            assert!(
                (a - f).abs() <= tolerance,
                "case {case}, weight {k}: parameter-shift {a} vs finite-difference {f}"
            );
        }
    }
    finish(name, clock, 60.0);
}

#[test]
fn analytic_forward_checks() {
    let name = "analytic forward checks";
    let clock = Instant::now();
    for n_qubits in 2..=4usize {
        for scheme in SCHEMES {
            for ansatz in [AnsatzKind::RealAmplitudes, AnsatzKind::EfficientSu2] {
                let model = VqcModel::new(ModelSpec {
                    n_qubits,
                    reps: 2,
                    entanglement: scheme,
                    feature_map: FeatureMapKind::Zz,
                    ansatz,
                })
                .unwrap();
                let x = vec![PI; n_qubits];
                let p1 = model.forward(&x).unwrap();
                assert!(
                    p1.abs() < 1e-10,
                    "n={n_qubits} {scheme}: p1 = {p1}"
                );
            }
        }
    }
    finish(name, clock, 1.0);
}

#[test]
fn structural_counts() {
    let name = "structural counts";
    let clock = Instant::now();
    for n in 2..=8usize {
        for reps in 1..=3usize {
            for scheme in SCHEMES {
                let ra = real_amplitudes(n, reps, scheme).unwrap();
                assert_eq!(ra.num_train_params(), n * (reps + 1));
                let su2 = efficient_su2(n, reps, scheme).unwrap();
                assert_eq!(su2.num_train_params(), 2 * n * (reps + 1));
            }
        }
        assert_eq!(EntanglementScheme::Linear.pairs(n).unwrap().len(), n - 1);
        let circular = EntanglementScheme::Circular.pairs(n).unwrap().len();
        assert_eq!(circular, if n == 2 { 1 } else { n });
        assert_eq!(
            EntanglementScheme::Full.pairs(n).unwrap().len(),
            n * (n - 1) / 2
        );
    }
    finish(name, clock, 1.0);
}

fn survey_config(path: &std::path::Path, selection: &str, entanglement: &str, seed: u64) -> ExperimentConfig {
    ConfigValues {
        data: Some(path.to_path_buf()),
        k_features: Some(3),
        selection: Some(selection.to_string()),
        train_size: Some(300),
        feature_map: Some("zz".to_string()),
        ansatz: Some("efficient-su2".to_string()),
        entanglement: Some(entanglement.to_string()),
        reps: Some(2),
        seed: Some(seed),
        ..ConfigValues::default()
    }
    .resolve()
    .unwrap()
}

#[test]
fn end_to_end_training() {
    let name = "end-to-end training";
    let clock = Instant::now();
    let Some(path) = htru_csv() else {
        skip(
            name,
            "canonical dataset not present; place HTRU_2.csv in data/ or set PULSAR_VQC_DATA",
        );
        return;
    };
    for (selection, entanglement) in [("fs1", "circular"), ("fs2", "full")] {
        let hit = (0..5u64).any(|seed| {
            let cfg = survey_config(&path, selection, entanglement, seed);
            let row = run_experiment(&cfg).expect("pipeline runs");
            row.accuracy >= 0.90 && row.mcc >= 0.40
        });
        assert!(
            hit,
            "no seed reached accuracy 0.90 and MCC 0.40 for {selection}/{entanglement}"
        );
    }
    finish(name, clock, 600.0);
}

#[test]
fn determinism() {
    let name = "determinism";
    let clock = Instant::now();

    let args = [
        "run",
        "--data",
        &fixture_csv().display().to_string(),
        "--k-features",
        "2",
        "--train-size",
        "36",
        "--entanglement",
        "linear",
        "--reps",
        "1",
        "--max-iterations",
        "30",
        "--seed",
        "2",
    ];
    let invoke = || {
        std::process::Command::new(env!("CARGO_BIN_EXE_pulsar-vqc"))
            .args(args)
            .output()
            .unwrap()
    };
    let first = invoke();
    let second = invoke();
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "run output is not stable");

    let grid: Vec<ExperimentConfig> = (0..4)
        .map(|seed| {
            ConfigValues {
                data: Some(fixture_csv()),
                k_features: Some(2),
                train_size: Some(36),
                entanglement: Some("linear".to_string()),
                reps: Some(1),
                seed: Some(seed),
                max_iterations: Some(30),
                ..ConfigValues::default()
            }
            .resolve()
            .unwrap()
        })
        .collect();
    let serial = run_grid(&grid, 1);
    let parallel = run_grid(&grid, 4);
    for (a, b) in serial.iter().zip(&parallel) {
        let a = a.as_ref().unwrap();
        let b = b.as_ref().unwrap();
        let bits = |row: &pulsar_vqc_cli::ResultRow| {
            [
                row.accuracy.to_bits(),
                row.precision.to_bits(),
                row.recall.to_bits(),
                row.f1.to_bits(),
                row.mcc.to_bits(),
            ]
        };
        assert_eq!(bits(a), bits(b), "grid values depend on parallelism");
    }
    finish(name, clock, 120.0);
}

#[test]
fn dataset_sanity() {
    let name = "dataset sanity";
    let clock = Instant::now();
    let Some(dataset) = canonical_dataset(name) else {
        return;
    };
    assert_eq!(dataset.n_samples(), 17_898);
    let positive = dataset.positive_fraction();
    assert!(
        (positive - 0.098).abs() <= 0.01,
        "positive fraction {positive}"
    );

    let profile: Vec<usize> = ["Prof-mu", "Prof-sigma", "Prof-k", "Prof-s"]
        .iter()
        .map(|nm| dataset.column_index(nm).unwrap())
        .collect();
    let outlier_frequency = |class: u8| -> f64 {
        let rows: Vec<usize> = dataset
            .labels
            .iter()
            .enumerate()
            .filter(|(_, &label)| label == class)
            .map(|(row, _)| row)
            .collect();
        let mut outliers = 0usize;
        for &column in &profile {
            let values: Vec<f64> = rows
                .iter()
                .map(|&row| dataset.features[[row, column]])
                .collect();
            outliers += boxplot_stats(&values).unwrap().outlier_count;
        }
        outliers as f64 / (profile.len() * rows.len()) as f64
    };
    assert!(
        outlier_frequency(0) > outlier_frequency(1),
        "profile outlier frequencies: class 0 {} vs class 1 {}",
        outlier_frequency(0),
        outlier_frequency(1)
    );
    finish(name, clock, 30.0);
}
