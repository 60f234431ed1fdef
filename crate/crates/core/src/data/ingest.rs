use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{DataError, GrayImage, Sample, SampleData};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceFormat {
    /// One sub-directory per class holding PNG or PGM files.
    Images,
    /// Pre-reduced features with a `label` column.
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentationSettings {
    pub target_per_class: usize,
    #[serde(default)]
    pub seed: u64,
    /// Drop surplus samples when a class exceeds the target.
    #[serde(default)]
    pub allow_subsample: bool,
}

/// Dataset description, read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetManifest {
    pub class_names: Vec<String>,
    /// Image root or CSV file. Relative paths resolve against the manifest.
    pub source: PathBuf,
    pub format: SourceFormat,
    pub split_ratios: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub augmentation: Option<AugmentationSettings>,
    /// Per-class sample counts after ingestion, filled in by tooling.
    #[serde(default)]
    pub counts: Option<Vec<usize>>,
    #[serde(default)]
    pub reducer: Option<String>,
}

impl DatasetManifest {
    pub fn from_toml(text: &str) -> Result<Self, DataError> {
        let m: Self = toml::from_str(text).map_err(|e| DataError::Manifest(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    /// Loads a manifest and makes `source` absolute relative to its directory.
    pub fn load(path: &Path) -> Result<Self, DataError> {
        let text = fs::read_to_string(path)?;
        let mut m = Self::from_toml(&text)?;
        if m.source.is_relative() {
            let base = path.parent().unwrap_or(Path::new("."));
            m.source = base.join(&m.source);
        }
        Ok(m)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("manifest serializes")
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.class_names.len() < 2 {
            return Err(DataError::Manifest("need at least two classes".into()));
        }
        for (i, a) in self.class_names.iter().enumerate() {
            if self.class_names[..i].contains(a) {
                return Err(DataError::Manifest(format!("duplicate class {a:?}")));
            }
        }
        super::split::check_ratios(&self.split_ratios)?;
        if let Some(c) = &self.counts {
            if c.len() != self.class_names.len() {
                return Err(DataError::Manifest(format!(
                    "{} counts for {} classes",
                    c.len(),
                    self.class_names.len()
                )));
            }
        }
        Ok(())
    }
}

/// Reads every sample the manifest points at, class by class, files in
/// lexicographic order.
pub fn ingest(manifest: &DatasetManifest) -> Result<Vec<Sample>, DataError> {
    manifest.validate()?;
    match manifest.format {
        SourceFormat::Images => ingest_images(&manifest.source, &manifest.class_names),
        SourceFormat::Csv => read_feature_csv(&manifest.source, &manifest.class_names),
    }
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "pgm"))
        .unwrap_or(false)
}

fn ingest_images(root: &Path, classes: &[String]) -> Result<Vec<Sample>, DataError> {
    let mut files = Vec::new();
    for (label, class) in classes.iter().enumerate() {
        let dir = root.join(class);
        if !dir.is_dir() {
            return Err(DataError::MissingClassDir(dir.display().to_string()));
        }
        let mut paths: Vec<PathBuf> = fs::read_dir(&dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<_, _>>()?;
        paths.retain(|p| p.is_file() && is_image(p));
        if paths.is_empty() {
            return Err(DataError::EmptyClass(class.clone()));
        }
        paths.sort();
        files.extend(paths.into_iter().map(|p| (label, p)));
    }
    files
        .par_iter()
        .map(|(label, path)| {
            Ok(Sample {
                data: SampleData::Image(GrayImage::load(path)?),
                label: *label,
                source: path
                    .file_name()
                    .map(|n| n.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                split: None,
            })
        })
        .collect()
}

fn parse_label(raw: &str, classes: &[String]) -> Result<usize, DataError> {
    let raw = raw.trim();
    if let Some(i) = classes.iter().position(|c| c == raw) {
        return Ok(i);
    }
    match raw.parse::<usize>() {
        Ok(i) if i < classes.len() => Ok(i),
        _ => Err(DataError::UnknownLabel(raw.to_string())),
    }
}

/// Reads a feature table. Every column other than `label` is a feature, in
/// header order; labels may be class indices or class names.
pub fn read_feature_csv(path: &Path, classes: &[String]) -> Result<Vec<Sample>, DataError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| DataError::Unreadable {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let headers = reader.headers()?.clone();
    let label_col = headers
        .iter()
        .position(|h| h.trim() == "label")
        .ok_or(DataError::NoLabelColumn)?;
    let mut out = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let mut features = Vec::with_capacity(record.len().saturating_sub(1));
        for (col, field) in record.iter().enumerate() {
            if col == label_col {
                continue;
            }
            let v: f64 = field.trim().parse().map_err(|_| DataError::BadRow {
                row: row + 1,
                reason: format!("column {:?} is not a number: {field:?}", &headers[col]),
            })?;
            if !v.is_finite() {
                return Err(DataError::BadRow {
                    row: row + 1,
                    reason: format!("non-finite value in column {:?}", &headers[col]),
                });
            }
            features.push(v);
        }
        out.push(Sample {
            data: SampleData::Features(features),
            label: parse_label(&record[label_col], classes)?,
            source: format!("row{}", row + 1),
            split: None,
        });
    }
    Ok(out)
}

/// Writes `f0..f{n-1},label` rows with round-trippable floats.
pub fn write_feature_csv(path: &Path, rows: &[(Vec<f64>, usize)]) -> Result<(), DataError> {
    let n = rows.first().map(|r| r.0.len()).unwrap_or(0);
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<String> = (0..n).map(|i| format!("f{i}")).collect();
    header.push("label".into());
    w.write_record(&header)?;
    for (features, label) in rows {
        if features.len() != n {
            return Err(DataError::FeatureLength {
                expected: n,
                got: features.len(),
            });
        }
        let mut rec: Vec<String> = features.iter().map(|v| format!("{v:?}")).collect();
        rec.push(label.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
