//! Subcommand implementations. Each returns a summary value and writes its
//! artifacts under the configured output directory.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use dqcnn_core::circuit::Angle;
use dqcnn_core::cutting::{split, CUT_TERMS};
use dqcnn_core::data::{
    augment, ingest, write_feature_csv, DatasetManifest, SourceFormat, Split, REDUCER_NAME,
};
use dqcnn_core::metrics::{compute_metrics, ConfusionMatrix, EvalReport};
use dqcnn_core::training::{evaluate, train, EpochLog, Example, Model, ModelConfig};
use dqcnn_core::{Circuit, CutSpec, Gate, ReconstructionPlan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checkpoint::Checkpoint;
use crate::config::{RunConfig, VerifyCircuit};
use crate::dataset::{self, Dataset};
use crate::error::{invalid, CliResult};
use crate::output::{write_atomic, write_json};

pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const LOG_FILE: &str = "train_log.csv";
pub const RESOLVED_CONFIG_FILE: &str = "config.resolved.toml";

// ---------------------------------------------------------------- verify-cut

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub circuit: VerifyCircuit,
    pub n_qubits: usize,
    pub trials: usize,
    pub cut: CutSpec,
    pub upstream_qubits: usize,
    pub downstream_qubits: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub corrupt_term: Option<usize>,
    pub pass: bool,
}

impl VerifyReport {
    pub fn summary(&self) -> String {
        format!(
            "{} verify-cut: {:?} circuit, {} qubits ({} + {} after cut on wire {} at gate {}), {} trials, max |cut - uncut| = {:.3e} (tolerance {:.0e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.circuit,
            self.n_qubits,
            self.upstream_qubits,
            self.downstream_qubits,
            self.cut.wire,
            self.cut.position,
            self.trials,
            self.max_deviation,
            self.tolerance,
        )
    }
}

fn max_deviation(bound: &Circuit, cut: CutSpec, corrupt: Option<usize>) -> CliResult<f64> {
    let exact = bound
        .simulate()
        .context("simulating uncut circuit")?
        .probabilities();
    let mut terms = CUT_TERMS;
    if let Some(k) = corrupt {
        terms[k - 1].coefficient = -terms[k - 1].coefficient;
    }
    let rebuilt =
        ReconstructionPlan::with_terms(split(bound, cut)?, terms).reconstruct_probabilities()?;
    Ok(exact
        .iter()
        .zip(&rebuilt)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Compares cut reconstruction with direct simulation over seeded random
/// models and inputs.
pub fn cmd_verify_cut(cfg: &RunConfig) -> CliResult<VerifyReport> {
    cfg.validate_verify()?;
    let v = &cfg.verify;
    let (n_qubits, trials, cut, deviation) = match v.circuit {
        VerifyCircuit::Bell => {
            let bell = Circuit::from_parts(
                2,
                vec![
                    Gate::H { target: 0 },
                    Gate::Cnot {
                        control: 0,
                        target: 1,
                    },
                ]
                .into_iter()
                .map(|g| g.map_angle(Angle::Literal))
                .collect(),
                vec![],
            )
            .context("building Bell circuit")?;
            let cut = CutSpec {
                wire: 0,
                position: 1,
            };
            (2, 1, cut, max_deviation(&bell, cut, v.corrupt_term)?)
        }
        VerifyCircuit::Mps => {
            let model_cfg = ModelConfig {
                n_qubits: v.n_qubits,
                cut: true,
                ..ModelConfig::default()
            };
            let mut rng = ChaCha8Rng::seed_from_u64(v.seed);
            let draws: Vec<(u64, Vec<f64>)> = (0..v.trials)
                .map(|_| {
                    let seed = rng.gen();
                    let x = (0..v.n_qubits).map(|_| rng.gen_range(0.0..PI)).collect();
                    (seed, x)
                })
                .collect();
            let cut = Model::new(model_cfg.clone(), 0)?
                .cut()
                .expect("cut enabled in config");
            let worst = draws
                .par_iter()
                .map(|(seed, x)| {
                    let model = Model::new(model_cfg.clone(), *seed)?;
                    max_deviation(&model.bind(x)?, cut, v.corrupt_term)
                })
                .collect::<CliResult<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            (v.n_qubits, v.trials, cut, worst)
        }
    };
    let report = VerifyReport {
        circuit: v.circuit,
        n_qubits,
        trials,
        cut,
        upstream_qubits: cut.wire + 1,
        downstream_qubits: n_qubits - cut.wire,
        max_deviation: deviation,
        tolerance: v.tolerance,
        corrupt_term: v.corrupt_term,
        pass: deviation < v.tolerance,
    };
    write_json(&cfg.output_dir.join("verify_cut.json"), &report)?;
    Ok(report)
}

// --------------------------------------------------------------------- train

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub checkpoint: Checkpoint,
    pub log: Vec<EpochLog>,
    pub output_dir: PathBuf,
}

impl TrainSummary {
    pub fn final_accuracy(&self, split: &str) -> Option<f64> {
        self.log
            .iter()
            .rev()
            .find(|l| l.split == split)
            .map(|l| l.accuracy)
    }
}

pub fn log_csv(log: &[EpochLog]) -> String {
    let mut s = String::from("epoch,split,loss,accuracy\n");
    for l in log {
        let _ = writeln!(s, "{},{},{:?},{:?}", l.epoch, l.split, l.loss, l.accuracy);
    }
    s
}

fn fit(
    cfg: &RunConfig,
    data: &Dataset,
) -> CliResult<(Model, dqcnn_core::training::Adadelta, Vec<EpochLog>)> {
    let model = Model::new(cfg.model.clone(), cfg.train.seed)?;
    let (held_name, held) = data.held_out();
    let out = train(
        model,
        data.train(),
        Some((held_name.name(), held)),
        &cfg.train,
    )?;
    Ok((out.model, out.optimizer, out.log))
}

/// Trains from the config and writes the checkpoint, the per-epoch log and a
/// snapshot of the resolved config.
pub fn cmd_train(cfg: &RunConfig) -> CliResult<TrainSummary> {
    let data = dataset::load(cfg)?;
    let (model, optimizer, log) = fit(cfg, &data)?;
    let checkpoint = Checkpoint::new(
        &model,
        optimizer,
        data.class_names.clone(),
        cfg.train.seed,
        cfg.train.epochs,
        cfg.digest(),
    );
    let dir = &cfg.output_dir;
    write_json(&dir.join(CHECKPOINT_FILE), &checkpoint)?;
    write_atomic(&dir.join(LOG_FILE), log_csv(&log).as_bytes())?;
    write_atomic(&dir.join(RESOLVED_CONFIG_FILE), cfg.to_toml().as_bytes())?;
    Ok(TrainSummary {
        checkpoint,
        log,
        output_dir: dir.clone(),
    })
}

// ---------------------------------------------------------------------- eval

/// Which part of the dataset to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalTarget {
    Split(Split),
    All,
}

impl std::str::FromStr for EvalTarget {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "train" => EvalTarget::Split(Split::Train),
            "validation" => EvalTarget::Split(Split::Validation),
            "test" => EvalTarget::Split(Split::Test),
            "all" => EvalTarget::All,
            _ => {
                return Err(format!(
                    "unknown split {s:?} (train, validation, test, all)"
                ))
            }
        })
    }
}

impl EvalTarget {
    fn name(self) -> &'static str {
        match self {
            EvalTarget::Split(s) => s.name(),
            EvalTarget::All => "all",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutput {
    pub dataset: String,
    pub split: String,
    pub cut: bool,
    pub class_names: Vec<String>,
    pub loss: f64,
    pub report: EvalReport,
}

fn report_for(model: &Model, examples: &[Example]) -> CliResult<(f64, EvalReport)> {
    let e = evaluate(model, examples)?;
    let labels: Vec<usize> = examples.iter().map(|x| x.label).collect();
    let cm = ConfusionMatrix::from_predictions(&labels, &e.predictions, model.n_classes())?;
    Ok((e.loss, compute_metrics(&cm, Some(&e.scores), &labels)?))
}

/// Evaluates a checkpoint on a split of the configured dataset.
///
/// The dataset is reduced with the checkpoint's qubit count; `cut` switches
/// the backend, otherwise the checkpoint's setting is kept.
pub fn cmd_eval(
    cfg: &RunConfig,
    checkpoint: &Path,
    target: EvalTarget,
    cut: Option<bool>,
) -> CliResult<EvalOutput> {
    let ck = Checkpoint::load(checkpoint)?;
    let mut model = ck.to_model()?;
    if let Some(c) = cut {
        model = model.with_cut(c)?;
    }
    let mut data_cfg = cfg.clone();
    data_cfg.model = ck.model.clone();
    let data = dataset::load(&data_cfg)?;
    if !ck.class_names.is_empty() && ck.class_names != data.class_names {
        return Err(invalid(format!(
            "checkpoint classes {:?} do not match dataset classes {:?}",
            ck.class_names, data.class_names
        )));
    }
    let examples = match target {
        EvalTarget::All => data.all(),
        EvalTarget::Split(s) => data
            .get(s)
            .ok_or_else(|| invalid(format!("dataset has no {} split", s.name())))?
            .to_vec(),
    };
    let (loss, report) = report_for(&model, &examples)?;
    let out = EvalOutput {
        dataset: data.name.clone(),
        split: target.name().into(),
        cut: model.cut().is_some(),
        class_names: data.class_names.clone(),
        loss,
        report,
    };
    let dir = &cfg.output_dir;
    write_json(&dir.join("report.json"), &out)?;
    write_atomic(
        &dir.join("report.txt"),
        out.report.to_text(Some(&out.class_names)).as_bytes(),
    )?;
    write_atomic(&dir.join("report.csv"), out.report.to_csv().as_bytes())?;
    Ok(out)
}

// -------------------------------------------------------------------- ablate

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricRow {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub auc: f64,
}

impl MetricRow {
    pub const NAMES: [&'static str; 6] = [
        "accuracy",
        "precision",
        "recall",
        "specificity",
        "f1",
        "auc",
    ];

    fn from_report(r: &EvalReport) -> Self {
        Self {
            accuracy: r.accuracy,
            precision: r.macro_precision,
            recall: r.macro_recall,
            specificity: r.macro_specificity,
            f1: r.macro_f1,
            auc: r.macro_auc,
        }
    }

    pub fn values(&self) -> [f64; 6] {
        [
            self.accuracy,
            self.precision,
            self.recall,
            self.specificity,
            self.f1,
            self.auc,
        ]
    }

    fn minus(&self, other: &Self) -> Self {
        let [a, p, r, s, f, u] = self.values();
        let [a2, p2, r2, s2, f2, u2] = other.values();
        Self {
            accuracy: a - a2,
            precision: p - p2,
            recall: r - r2,
            specificity: s - s2,
            f1: f - f2,
            auc: u - u2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub dataset: String,
    pub cut: bool,
    pub metrics: MetricRow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub split: String,
    pub rows: Vec<AblationRow>,
    /// Cut minus uncut, per metric.
    pub delta: MetricRow,
}

impl AblationReport {
    pub fn max_abs_delta(&self) -> f64 {
        self.delta
            .values()
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{:<14}{:>5}", "dataset", "cut");
        for n in MetricRow::NAMES {
            let _ = write!(s, "{n:>13}");
        }
        s.push('\n');
        for row in &self.rows {
            let _ = write!(
                s,
                "{:<14}{:>5}",
                row.dataset,
                if row.cut { "√" } else { "×" }
            );
            for v in row.metrics.values() {
                let _ = write!(s, "{v:>13.6}");
            }
            s.push('\n');
        }
        let _ = write!(s, "{:<14}{:>5}", "delta", "");
        for v in self.delta.values() {
            let _ = write!(s, "{v:>13.2e}");
        }
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("dataset,cut,{}\n", MetricRow::NAMES.join(","));
        let row = |s: &mut String, name: &str, cut: &str, m: &MetricRow| {
            let vals: Vec<String> = m.values().iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(s, "{name},{cut},{}", vals.join(","));
        };
        for r in &self.rows {
            row(
                &mut s,
                &r.dataset,
                if r.cut { "true" } else { "false" },
                &r.metrics,
            );
        }
        row(&mut s, "delta", "", &self.delta);
        s
    }
}

/// Trains twice with identical seeds, cutting off then on, and compares the
/// held-out metrics.
pub fn cmd_ablate(cfg: &RunConfig) -> CliResult<AblationReport> {
    let data = dataset::load(cfg)?;
    let (eval_split, eval_set) = match data.get(Split::Test) {
        Some(t) => (Split::Test, t),
        None => data.held_out(),
    };
    let mut rows = Vec::with_capacity(2);
    for cut in [false, true] {
        let mut run = cfg.clone();
        run.model.cut = cut;
        let (model, _, _) = fit(&run, &data)?;
        let (_, report) = report_for(&model, eval_set)?;
        rows.push(AblationRow {
            dataset: data.name.clone(),
            cut,
            metrics: MetricRow::from_report(&report),
        });
    }
    let report = AblationReport {
        split: eval_split.name().into(),
        delta: rows[1].metrics.minus(&rows[0].metrics),
        rows,
    };
    let dir = &cfg.output_dir;
    write_json(&dir.join("ablation.json"), &report)?;
    write_atomic(&dir.join("ablation.txt"), report.to_text().as_bytes())?;
    write_atomic(&dir.join("ablation.csv"), report.to_csv().as_bytes())?;
    Ok(report)
}

// -------------------------------------------------------------------- encode

#[derive(Debug, Clone)]
pub struct EncodeSummary {
    pub features_csv: PathBuf,
    pub manifest: PathBuf,
    pub counts: Vec<usize>,
}

/// Reduces an image dataset to one angle per qubit and writes a feature CSV
/// plus a manifest that points at it.
pub fn cmd_encode(cfg: &RunConfig) -> CliResult<EncodeSummary> {
    let path = cfg
        .data
        .manifest
        .as_ref()
        .ok_or_else(|| invalid("encode needs data.manifest"))?;
    cfg.validate_data()?;
    let manifest = DatasetManifest::load(path)?;
    if manifest.format != SourceFormat::Images {
        return Err(invalid("encode needs an image manifest"));
    }
    let mut samples = ingest(&manifest)?;
    if let Some(aug) = &manifest.augmentation {
        samples = augment(samples, aug.target_per_class, aug.seed, aug.allow_subsample)?;
    }
    let n = cfg.model.n_qubits;
    let rows = samples
        .par_iter()
        .map(|s| Ok((s.features(n)?, s.label)))
        .collect::<CliResult<Vec<_>>>()?;
    let mut counts = vec![0usize; manifest.class_names.len()];
    for (_, label) in &rows {
        counts[*label] += 1;
    }
    let dir = &cfg.output_dir;
    std::fs::create_dir_all(dir)?;
    let features_csv = dir.join("features.csv");
    let tmp = dir.join(".features.csv.tmp");
    write_feature_csv(&tmp, &rows)?;
    std::fs::rename(&tmp, &features_csv)?;
    let derived = DatasetManifest {
        class_names: manifest.class_names.clone(),
        source: PathBuf::from("features.csv"),
        format: SourceFormat::Csv,
        split_ratios: manifest.split_ratios.clone(),
        seed: manifest.seed,
        augmentation: None,
        counts: Some(counts.clone()),
        reducer: Some(format!("{REDUCER_NAME}:{n}")),
    };
    let manifest_path = dir.join("features.toml");
    write_atomic(&manifest_path, derived.to_toml().as_bytes())?;
    Ok(EncodeSummary {
        features_csv,
        manifest: manifest_path,
        counts,
    })
}
