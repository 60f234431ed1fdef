//! Confusion matrices and per-class classification metrics.
//!
//! Quantities with a zero denominator are reported as 0 and listed in
//! [`EvalReport::undefined`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("{labels} labels but {other} predictions or score rows")]
    LengthMismatch { labels: usize, other: usize },
    #[error("class {class} out of range for {n_classes} classes")]
    ClassOutOfRange { class: usize, n_classes: usize },
    #[error("score row {row} has {got} entries, expected {expected}")]
    ScoreShape {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("no samples")]
    Empty,
}

/// Rows are true classes, columns are predictions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(counts: Vec<Vec<u64>>) -> Result<Self, MetricsError> {
        let k = counts.len();
        if k == 0 {
            return Err(MetricsError::Empty);
        }
        if let Some((row, r)) = counts.iter().enumerate().find(|(_, r)| r.len() != k) {
            return Err(MetricsError::ScoreShape {
                row,
                expected: k,
                got: r.len(),
            });
        }
        Ok(Self { counts })
    }

    pub fn from_predictions(
        labels: &[usize],
        predictions: &[usize],
        n_classes: usize,
    ) -> Result<Self, MetricsError> {
        if labels.len() != predictions.len() {
            return Err(MetricsError::LengthMismatch {
                labels: labels.len(),
                other: predictions.len(),
            });
        }
        let mut counts = vec![vec![0u64; n_classes]; n_classes];
        for (&y, &p) in labels.iter().zip(predictions) {
            for class in [y, p] {
                if class >= n_classes {
                    return Err(MetricsError::ClassOutOfRange { class, n_classes });
                }
            }
            counts[y][p] += 1;
        }
        Ok(Self { counts })
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.n_classes()).map(|i| self.counts[i][i]).sum()
    }

    /// `(tp, fp, fn, tn)` for class `c` against the rest.
    pub fn one_vs_rest(&self, c: usize) -> (u64, u64, u64, u64) {
        let tp = self.counts[c][c];
        let row: u64 = self.counts[c].iter().sum();
        let col: u64 = self.counts.iter().map(|r| r[c]).sum();
        let fp = col - tp;
        let fn_ = row - tp;
        (tp, fp, fn_, self.total() - tp - fp - fn_)
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: usize,
    pub support: u64,
    pub precision: f64,
    pub recall: f64,
    pub specificity: f64,
    pub f1: f64,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_samples: u64,
    pub accuracy: f64,
    pub classes: Vec<ClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_specificity: f64,
    pub macro_f1: f64,
    /// Mean over classes whose AUC is defined.
    pub macro_auc: f64,
    pub confusion: ConfusionMatrix,
    /// `"<metric>[<class>]"` for every value left undefined.
    pub undefined: Vec<String>,
}

/// One-vs-rest ROC AUC with tied scores counted as half.
///
/// `None` when either side is empty.
pub fn binary_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Rank sum of positives with average ranks over ties.
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        let pos_in_group = order[i..=j].iter().filter(|&&k| positive[k]).count();
        rank_sum += avg_rank * pos_in_group as f64;
        i = j + 1;
    }
    let p = n_pos as f64;
    Some((rank_sum - p * (p + 1.0) / 2.0) / (p * n_neg as f64))
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.collect();
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Builds the full report. `scores[i][c]` is the score of sample `i` for
/// class `c`; without scores every AUC is undefined.
pub fn compute_metrics(
    cm: &ConfusionMatrix,
    scores: Option<&[Vec<f64>]>,
    labels: &[usize],
) -> Result<EvalReport, MetricsError> {
    let k = cm.n_classes();
    let total = cm.total();
    if total == 0 {
        return Err(MetricsError::Empty);
    }
    if let Some(scores) = scores {
        if scores.len() != labels.len() {
            return Err(MetricsError::LengthMismatch {
                labels: labels.len(),
                other: scores.len(),
            });
        }
        if let Some((row, s)) = scores.iter().enumerate().find(|(_, s)| s.len() != k) {
            return Err(MetricsError::ScoreShape {
                row,
                expected: k,
                got: s.len(),
            });
        }
        if let Some(&class) = labels.iter().find(|&&y| y >= k) {
            return Err(MetricsError::ClassOutOfRange {
                class,
                n_classes: k,
            });
        }
    }

    let mut undefined = Vec::new();
    let mut classes = Vec::with_capacity(k);
    let mut defined_auc = Vec::new();
    for c in 0..k {
        let (tp, fp, fn_, tn) = cm.one_vs_rest(c);
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let specificity = ratio(tn, tn + fp);
        let f1 = match (precision, recall) {
            (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        };
        let auc = scores.and_then(|s| {
            let col: Vec<f64> = s.iter().map(|row| row[c]).collect();
            let pos: Vec<bool> = labels.iter().map(|&y| y == c).collect();
            binary_auc(&col, &pos)
        });
        defined_auc.extend(auc);
        let mut value = |name: &str, v: Option<f64>| {
            if v.is_none() {
                undefined.push(format!("{name}[{c}]"));
            }
            v.unwrap_or(0.0)
        };
        classes.push(ClassMetrics {
            class: c,
            support: tp + fn_,
            precision: value("precision", precision),
            recall: value("recall", recall),
            specificity: value("specificity", specificity),
            f1: value("f1", f1),
            auc: value("auc", auc),
        });
    }
    Ok(EvalReport {
        n_samples: total,
        accuracy: cm.trace() as f64 / total as f64,
        macro_precision: mean(classes.iter().map(|m| m.precision)),
        macro_recall: mean(classes.iter().map(|m| m.recall)),
        macro_specificity: mean(classes.iter().map(|m| m.specificity)),
        macro_f1: mean(classes.iter().map(|m| m.f1)),
        macro_auc: mean(defined_auc.into_iter()),
        classes,
        confusion: cm.clone(),
        undefined,
    })
}

fn cell(v: f64) -> String {
    format!("{v:.4}")
}

impl EvalReport {
    /// Human-readable table followed by the confusion matrix.
    pub fn to_text(&self, class_names: Option<&[String]>) -> String {
        let name = |c: usize| {
            class_names
                .and_then(|n| n.get(c).cloned())
                .unwrap_or_else(|| c.to_string())
        };
        let mut s = String::new();
        let _ = writeln!(s, "samples   {}", self.n_samples);
        let _ = writeln!(s, "accuracy  {:.4}", self.accuracy);
        let _ = writeln!(
            s,
            "\n{:<14}{:>10}{:>10}{:>12}{:>10}{:>10}{:>9}",
            "class", "precision", "recall", "specificity", "f1", "auc", "support"
        );
        for m in &self.classes {
            let _ = writeln!(
                s,
                "{:<14}{:>10}{:>10}{:>12}{:>10}{:>10}{:>9}",
                name(m.class),
                cell(m.precision),
                cell(m.recall),
                cell(m.specificity),
                cell(m.f1),
                cell(m.auc),
                m.support
            );
        }
        let _ = writeln!(
            s,
            "{:<14}{:>10}{:>10}{:>12}{:>10}{:>10}{:>9}",
            "macro",
            cell(self.macro_precision),
            cell(self.macro_recall),
            cell(self.macro_specificity),
            cell(self.macro_f1),
            cell(self.macro_auc),
            self.n_samples
        );
        let _ = writeln!(s, "\nconfusion (rows: true, columns: predicted)");
        for (c, row) in self.confusion.counts().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>7}")).collect();
            let _ = writeln!(s, "{:<14}{}", name(c), cells.join(""));
        }
        if !self.undefined.is_empty() {
            let _ = writeln!(
                s,
                "\nundefined (reported as 0): {}",
                self.undefined.join(", ")
            );
        }
        s
    }

    /// One row per class plus a `macro` row.
    pub fn to_csv(&self) -> String {
        let f = |v: f64| format!("{v:?}");
        let mut s = String::from("class,precision,recall,specificity,f1,auc,support\n");
        for m in &self.classes {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                m.class,
                f(m.precision),
                f(m.recall),
                f(m.specificity),
                f(m.f1),
                f(m.auc),
                m.support
            );
        }
        let _ = writeln!(
            s,
            "macro,{},{},{},{},{},{}",
            f(self.macro_precision),
            f(self.macro_recall),
            f(self.macro_specificity),
            f(self.macro_f1),
            f(self.macro_auc),
            self.n_samples
        );
        s
    }
}
