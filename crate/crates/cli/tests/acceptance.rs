//! Acceptance suite. Runs every criterion at its stated tolerance, prints one
//! `[PASS]`/`[FAIL]` line each and exits non-zero if any fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use dqcnn_cli::commands::{cmd_ablate, cmd_train, cmd_verify_cut};
use dqcnn_cli::config::{DataConfig, SyntheticData, VerifyCircuit};
use dqcnn_cli::RunConfig;
use dqcnn_core::cutting::{split, CUT_TERMS};
use dqcnn_core::data::{read_feature_csv, split as split_samples, DatasetManifest, Split};
use dqcnn_core::metrics::{compute_metrics, ConfusionMatrix};
use dqcnn_core::statevector::Eigenstate;
use dqcnn_core::training::{
    batch_gradient, evaluate, train, Example, Model, ModelConfig, TrainConfig,
};
use dqcnn_core::{Gate, StateVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dqcnn-acceptance-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn synthetic_config(out: &Path) -> RunConfig {
    RunConfig {
        output_dir: out.to_path_buf(),
        data: DataConfig {
            manifest: None,
            synthetic: Some(SyntheticData {
                n_samples: 200,
                n_classes: 2,
                seed: 7,
                split_ratios: vec![0.8, 0.2],
            }),
        },
        ..RunConfig::default()
    }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed <= limit
}

// 1. Cut reconstruction against direct simulation.
fn cut_exactness() -> Outcome {
    let start = Instant::now();
    let mut cfg = synthetic_config(&scratch("verify"));
    let mps = cmd_verify_cut(&cfg).expect("verify-cut runs");
    cfg.verify.circuit = VerifyCircuit::Bell;
    let bell = cmd_verify_cut(&cfg).expect("verify-cut runs on Bell");
    cfg.verify.circuit = VerifyCircuit::Mps;
    cfg.verify.trials = 5;
    cfg.verify.corrupt_term = Some(4);
    let corrupted = cmd_verify_cut(&cfg).expect("verify-cut runs corrupted");
    let elapsed = start.elapsed();
    outcome(
        mps.pass
            && mps.trials == 100
            && mps.n_qubits == 8
            && bell.pass
            && !corrupted.pass
            && within(elapsed, Duration::from_secs(60)),
        format!(
            "8-qubit max dev {:.2e} over {} trials, Bell {:.2e}, corrupted table {:.2e} (rejected), {:.1?}",
            mps.max_deviation, mps.trials, bell.max_deviation, corrupted.max_deviation, elapsed
        ),
    )
}

// 2. Default cut widths.
fn fragment_widths() -> Outcome {
    let model = Model::new(
        ModelConfig {
            cut: true,
            ..ModelConfig::default()
        },
        0,
    )
    .expect("default model");
    let cut = model.cut().expect("cut enabled");
    let pair = split(&model.bind(&[0.5; 8]).expect("bind"), cut).expect("split");
    let (up, down) = (pair.upstream.n_qubits(), pair.downstream.n_qubits());
    outcome(
        up == 5 && down == 4 && cut.wire == 4,
        format!(
            "wire {} at gate {}: upstream {up} qubits, downstream {down} qubits",
            cut.wire, cut.position
        ),
    )
}

// 3. The eight-term table resolves arbitrary single-qubit densities.
fn resolution_of_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let i = Complex64::i();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let r = loop {
            let v: [f64; 3] = [0; 3].map(|_| rng.gen_range(-1.0..1.0));
            if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                break v;
            }
        };
        let rho = [
            [Complex64::from(0.5 * (1.0 + r[2])), 0.5 * (r[0] - i * r[1])],
            [0.5 * (r[0] + i * r[1]), Complex64::from(0.5 * (1.0 - r[2]))],
        ];
        let mut sum = [[Complex64::default(); 2]; 2];
        for t in CUT_TERMS {
            let o = t.observable.matrix();
            let tr: Complex64 = (0..2)
                .flat_map(|a| (0..2).map(move |b| (a, b)))
                .map(|(a, b)| o[a][b] * rho[b][a])
                .sum();
            let psi = t.eigenstate.amplitudes();
            for a in 0..2 {
                for b in 0..2 {
                    sum[a][b] += t.coefficient * tr * psi[a] * psi[b].conj();
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                worst = worst.max((sum[a][b] - rho[a][b]).norm());
            }
        }
    }
    outcome(
        worst < 1e-12,
        format!("100 random densities, max entry error {worst:.2e}"),
    )
}

// 4. Parameter shift against central differences.
fn gradient_correctness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let n = rng.gen_range(2..=4);
        let model = Model::new(
            ModelConfig {
                n_qubits: n,
                cut: trial % 2 == 1,
                ..ModelConfig::default()
            },
            rng.gen(),
        )
        .expect("model");
        let batch: Vec<Example> = (0..3)
            .map(|k| Example {
                features: (0..n).map(|_| rng.gen_range(0.0..PI)).collect(),
                label: k % 2,
            })
            .collect();
        let analytic = batch_gradient(&model, &batch).expect("gradient").flatten();
        let params = model.parameters();
        let h = 1e-5;
        for (idx, g) in analytic.iter().enumerate() {
            let loss = |delta: f64| {
                let mut p = params.clone();
                p[idx] += delta;
                let mut m = model.clone();
                m.set_parameters(&p).expect("parameters");
                evaluate(&m, &batch).expect("evaluate").loss
            };
            let fd = (loss(h) - loss(-h)) / (2.0 * h);
            worst = worst.max((fd - g).abs());
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-6 && within(elapsed, Duration::from_secs(30)),
        format!("20 models (2-4 qubits, half cut), max |shift - fd| {worst:.2e}, {elapsed:.1?}"),
    )
}

// 5. Unitarity, norm preservation and eigenstate labels.
fn simulator_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut unitarity: f64 = 0.0;
    for _ in 0..50 {
        let a = rng.gen_range(-2.0 * PI..2.0 * PI);
        for g in [
            Gate::H { target: 0 },
            Gate::Ry {
                target: 0,
                theta: a,
            },
            Gate::Rz { target: 0, phi: a },
            Gate::Cry {
                control: 0,
                target: 1,
                theta: a,
            },
            Gate::Cnot {
                control: 0,
                target: 1,
            },
        ] {
            let u = g.matrix();
            let d = u.len();
            for r in 0..d {
                for c in 0..d {
                    let dot: Complex64 = (0..d).map(|k| u[k][r].conj() * u[k][c]).sum();
                    let want = if r == c { 1.0 } else { 0.0 };
                    unitarity = unitarity.max((dot - want).norm());
                }
            }
        }
    }
    let mut norm: f64 = 0.0;
    for _ in 0..20 {
        let n = 6;
        let mut s = StateVector::zero(n).expect("state");
        for _ in 0..100 {
            let q = rng.gen_range(0..n);
            let p = (q + rng.gen_range(1..n)) % n;
            let a = rng.gen_range(-PI..PI);
            let g = match rng.gen_range(0..5) {
                0 => Gate::H { target: q },
                1 => Gate::Ry {
                    target: q,
                    theta: a,
                },
                2 => Gate::Rz { target: q, phi: a },
                3 => Gate::Cry {
                    control: q,
                    target: p,
                    theta: a,
                },
                _ => Gate::Cnot {
                    control: q,
                    target: p,
                },
            };
            s.apply_in_place(&g).expect("gate");
        }
        norm = norm.max((s.norm_sqr() - 1.0).abs());
    }
    let mut eigen: f64 = 0.0;
    for e in Eigenstate::ALL {
        let (pauli, value) = e.eigen_pair();
        let m = pauli.matrix();
        let v = e.amplitudes();
        for r in 0..2 {
            let applied = m[r][0] * v[0] + m[r][1] * v[1];
            eigen = eigen.max((applied - value * v[r]).norm());
        }
    }
    outcome(
        unitarity < 1e-12 && norm < 1e-10 && eigen == 0.0,
        format!("unitarity {unitarity:.1e}, norm drift {norm:.1e} (100-gate circuits), eigen residual {eigen:.1e}"),
    )
}

// 6. Convergence on separable synthetic data.
fn training_sanity() -> Outcome {
    let start = Instant::now();
    let mut cfg = synthetic_config(&scratch("train"));
    cfg.train = TrainConfig {
        epochs: 50,
        batch_size: 16,
        seed: 1,
        ..TrainConfig::default()
    };
    let summary = cmd_train(&cfg).expect("train runs");
    let best = summary
        .log
        .iter()
        .filter(|l| l.split == "train")
        .map(|l| l.accuracy)
        .fold(0.0, f64::max);
    let last = summary.final_accuracy("train").unwrap_or(0.0);
    let elapsed = start.elapsed();
    outcome(
        best >= 0.95 && within(elapsed, Duration::from_secs(600)),
        format!(
            "200 samples, 8 features, 50 epochs, lr {}: best train accuracy {best:.4}, final {last:.4}, {elapsed:.1?}",
            cfg.train.optimizer.lr
        ),
    )
}

// 7. Cutting does not change training outcomes.
fn ablation_equivalence() -> Outcome {
    let mut cfg = synthetic_config(&scratch("ablate"));
    cfg.train = TrainConfig {
        epochs: 10,
        seed: 2,
        ..TrainConfig::default()
    };
    cfg.train.optimizer.lr = 1.0;
    let report = cmd_ablate(&cfg).expect("ablate runs");
    let delta = report.max_abs_delta();
    outcome(
        report.rows.len() == 2 && delta < 1e-3,
        format!(
            "accuracy uncut {:.4} / cut {:.4}, max |delta| over 6 metrics {delta:.2e}",
            report.rows[0].metrics.accuracy, report.rows[1].metrics.accuracy
        ),
    )
}

// 8. Metrics against per-sample counting.
fn metrics_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut exact = true;
    for k in 2..=7 {
        let n = 1000;
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let preds: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        let cm = ConfusionMatrix::from_predictions(&labels, &preds, k).expect("cm");
        let r = compute_metrics(&cm, None, &labels).expect("metrics");
        let hits = labels.iter().zip(&preds).filter(|(a, b)| a == b).count();
        exact &= r.accuracy == hits as f64 / n as f64;
        for c in 0..k {
            let (mut tp, mut fp, mut fn_, mut tn) = (0u64, 0u64, 0u64, 0u64);
            for (&y, &p) in labels.iter().zip(&preds) {
                match (y == c, p == c) {
                    (true, true) => tp += 1,
                    (false, true) => fp += 1,
                    (true, false) => fn_ += 1,
                    (false, false) => tn += 1,
                }
            }
            let m = &r.classes[c];
            let precision = tp as f64 / (tp + fp) as f64;
            let recall = tp as f64 / (tp + fn_) as f64;
            exact &= m.precision == precision
                && m.recall == recall
                && m.specificity == tn as f64 / (tn + fp) as f64
                && (m.f1 - 2.0 * precision * recall / (precision + recall)).abs() < 1e-15;
        }
    }
    let labels: Vec<usize> = (0..200).map(|i| i % 2).collect();
    let scores: Vec<Vec<f64>> = labels
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let s = 0.5 + (i as f64 + 1.0) / 1000.0;
            if y == 1 {
                vec![1.0 - s, s]
            } else {
                vec![s, 1.0 - s]
            }
        })
        .collect();
    let cm = ConfusionMatrix::from_predictions(&labels, &labels, 2).expect("cm");
    let perfect = compute_metrics(&cm, Some(&scores), &labels)
        .expect("metrics")
        .macro_auc;
    let constant = vec![vec![0.5, 0.5]; 200];
    let flat = compute_metrics(&cm, Some(&constant), &labels)
        .expect("metrics")
        .macro_auc;
    outcome(
        exact && perfect == 1.0 && (flat - 0.5).abs() <= 0.02,
        format!("1000 samples x 2-7 classes exact: {exact}, perfect-ranker AUC {perfect}, constant AUC {flat}"),
    )
}

// 9. Real medical data: accuracy over the majority baseline.
fn real_data_over_baseline() -> Outcome {
    let start = Instant::now();
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let manifest = DatasetManifest::load(&dir.join("breast_cancer.toml")).expect("manifest");
    let samples = read_feature_csv(&manifest.source, &manifest.class_names).expect("csv");
    let per_class: Vec<usize> = (0..2)
        .map(|c| samples.iter().filter(|s| s.label == c).count())
        .collect();
    let parts = split_samples(samples, &manifest.split_ratios, manifest.seed).expect("split");
    let to_examples = |part: &[dqcnn_core::data::Sample]| -> Vec<Example> {
        part.iter()
            .map(|s| s.to_example(8).expect("8 features"))
            .collect()
    };
    let train_set = to_examples(&parts[0]);
    let test_set = to_examples(&parts[1]);
    let test_counts: Vec<usize> = (0..2)
        .map(|c| test_set.iter().filter(|e| e.label == c).count())
        .collect();
    let baseline = *test_counts.iter().max().unwrap() as f64 / test_set.len() as f64;

    let mut config = TrainConfig {
        epochs: 20,
        batch_size: 16,
        seed: 3,
        ..TrainConfig::default()
    };
    config.optimizer.lr = 1.0;
    let model = Model::new(ModelConfig::default(), config.seed).expect("model");
    let out = train(
        model,
        &train_set,
        Some((Split::Test.name(), &test_set)),
        &config,
    )
    .expect("train");
    let acc = evaluate(&out.model, &test_set).expect("evaluate").accuracy;
    let elapsed = start.elapsed();
    outcome(
        per_class.iter().all(|&c| c >= 200) && acc >= baseline + 0.10,
        format!(
            "breast-cancer CSV ({} / {} per class), test accuracy {acc:.4} vs majority baseline {baseline:.4} (need +0.10), lr {}, {} epochs, {elapsed:.1?}",
            per_class[0], per_class[1], config.optimizer.lr, config.epochs
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 9] = [
        ("cut reconstruction exactness", cut_exactness),
        ("default fragment widths", fragment_widths),
        ("resolution of identity", resolution_of_identity),
        ("gradient correctness", gradient_correctness),
        ("simulator soundness", simulator_soundness),
        ("training sanity", training_sanity),
        ("ablation equivalence", ablation_equivalence),
        ("metrics oracle", metrics_oracle),
        ("real data over baseline", real_data_over_baseline),
    ];
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let result = check();
        if !result.pass {
            failed += 1;
        }
        println!(
            "[{}] {} {}: {}",
            if result.pass { "PASS" } else { "FAIL" },
            i + 1,
            name,
            result.detail
        );
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
