use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DataError, Sample};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    /// Split names for a ratio list of length 2 (train/test) or 3.
    pub fn for_count(k: usize) -> &'static [Split] {
        match k {
            2 => &[Split::Train, Split::Test],
            _ => &[Split::Train, Split::Validation, Split::Test],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

pub(crate) fn check_ratios(ratios: &[f64]) -> Result<(), DataError> {
    if !(2..=3).contains(&ratios.len()) {
        return Err(DataError::Ratios(format!(
            "expected 2 or 3 ratios, got {}",
            ratios.len()
        )));
    }
    if ratios.iter().any(|r| !r.is_finite() || *r <= 0.0) {
        return Err(DataError::Ratios(format!(
            "{ratios:?} must all be positive"
        )));
    }
    let sum: f64 = ratios.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(DataError::Ratios(format!("{ratios:?} sums to {sum}")));
    }
    Ok(())
}

fn largest_remainder(total: usize, ratios: &[f64]) -> Vec<usize> {
    let quotas: Vec<f64> = ratios.iter().map(|r| total as f64 * r).collect();
    let mut out: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..ratios.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let short = total - out.iter().sum::<usize>();
    for &s in order.iter().take(short) {
        out[s] += 1;
    }
    out
}

/// Per-class allocation whose column sums match the global largest-remainder
/// totals whenever a consistent rounding exists.
fn allocate(class_counts: &[usize], ratios: &[f64]) -> Vec<Vec<usize>> {
    let k = ratios.len();
    let total: usize = class_counts.iter().sum();
    let targets = largest_remainder(total, ratios);
    let mut alloc: Vec<Vec<usize>> = class_counts
        .iter()
        .map(|&n| {
            ratios
                .iter()
                .map(|r| (n as f64 * r).floor() as usize)
                .collect()
        })
        .collect();
    let mut row_left: Vec<usize> = class_counts
        .iter()
        .zip(&alloc)
        .map(|(n, a)| n - a.iter().sum::<usize>())
        .collect();
    let mut col_left: Vec<usize> = (0..k)
        .map(|s| targets[s].saturating_sub(alloc.iter().map(|a| a[s]).sum()))
        .collect();

    let mut cells: Vec<(usize, usize, f64)> = Vec::new();
    for (c, &n) in class_counts.iter().enumerate() {
        for (s, r) in ratios.iter().enumerate() {
            let q = n as f64 * r;
            cells.push((c, s, q - q.floor()));
        }
    }
    cells.sort_by(|a, b| b.2.total_cmp(&a.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    for &(c, s, _) in &cells {
        if row_left[c] > 0 && col_left[s] > 0 {
            alloc[c][s] += 1;
            row_left[c] -= 1;
            col_left[s] -= 1;
        }
    }
    // Anything the greedy pass could not place follows the class's own
    // fractional order.
    for &(c, s, _) in &cells {
        if row_left[c] > 0 {
            alloc[c][s] += 1;
            row_left[c] -= 1;
        }
    }
    // Every class appears in every split.
    for row in &mut alloc {
        for s in 0..k {
            if row[s] == 0 {
                let donor = (0..k)
                    .max_by_key(|&d| (row[d], std::cmp::Reverse(d)))
                    .unwrap();
                row[donor] -= 1;
                row[s] += 1;
            }
        }
    }
    alloc
}

/// Stratified seeded split. Returns one list per ratio, each sample tagged
/// with its split and kept in input order.
pub fn split(
    samples: Vec<Sample>,
    ratios: &[f64],
    seed: u64,
) -> Result<Vec<Vec<Sample>>, DataError> {
    check_ratios(ratios)?;
    let k = ratios.len();
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in samples.iter().enumerate() {
        by_class.entry(s.label).or_default().push(i);
    }
    for (&class, idx) in &by_class {
        if idx.len() < k {
            return Err(DataError::ClassTooSmall {
                class,
                count: idx.len(),
                splits: k,
            });
        }
    }
    let counts: Vec<usize> = by_class.values().map(Vec::len).collect();
    let alloc = allocate(&counts, ratios);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; samples.len()];
    for (idx, row) in by_class.values().zip(&alloc) {
        let mut idx = idx.clone();
        idx.shuffle(&mut rng);
        let mut it = idx.into_iter();
        for (s, &n) in row.iter().enumerate() {
            for i in it.by_ref().take(n) {
                assignment[i] = s;
            }
        }
    }
    let names = Split::for_count(k);
    let mut out: Vec<Vec<Sample>> = vec![Vec::new(); k];
    for (mut sample, s) in samples.into_iter().zip(assignment) {
        sample.split = Some(names[s]);
        out[s].push(sample);
    }
    Ok(out)
}
