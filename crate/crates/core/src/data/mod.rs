//! Dataset ingestion, image reduction, class balancing and splitting.

mod augment;
mod image;
mod ingest;
mod split;
pub mod synthetic;

pub use self::image::{reduce, GrayImage, Transform, REDUCER_NAME};
pub use augment::augment;
pub use ingest::{
    ingest, read_feature_csv, write_feature_csv, AugmentationSettings, DatasetManifest,
    SourceFormat,
};
pub use split::{split, Split};

use thiserror::Error;

use crate::training::Example;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing class directory {0}")]
    MissingClassDir(String),
    #[error("no images found for class {0:?}")]
    EmptyClass(String),
    #[error("cannot read {path}: {reason}")]
    Unreadable { path: String, reason: String },
    #[error("csv has no label column")]
    NoLabelColumn,
    #[error("bad csv row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("unknown class label {0:?}")]
    UnknownLabel(String),
    #[error("image has zero area ({width}x{height})")]
    DegenerateImage { width: usize, height: usize },
    #[error("{0}")]
    Image(String),
    #[error("augmentation needs images; sample {0} only has features")]
    AugmentFeatures(String),
    #[error("class {class} already has {count} samples, above target {target}")]
    TargetBelowCount {
        class: usize,
        count: usize,
        target: usize,
    },
    #[error("invalid split ratios: {0}")]
    Ratios(String),
    #[error("class {class} has {count} samples, fewer than the {splits} splits")]
    ClassTooSmall {
        class: usize,
        count: usize,
        splits: usize,
    },
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("feature vector has length {got}, expected {expected}")]
    FeatureLength { expected: usize, got: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Sample payload: a raw image or an already reduced feature vector.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleData {
    Image(GrayImage),
    Features(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub data: SampleData,
    pub label: usize,
    /// File name or CSV row the sample came from; augmented samples append
    /// the transform name.
    pub source: String,
    pub split: Option<Split>,
}

impl Sample {
    /// Feature vector of length `n`, reducing the image if needed.
    pub fn features(&self, n: usize) -> Result<Vec<f64>, DataError> {
        let f = match &self.data {
            SampleData::Image(img) => reduce(img, n)?,
            SampleData::Features(f) => f.clone(),
        };
        if f.len() != n {
            return Err(DataError::FeatureLength {
                expected: n,
                got: f.len(),
            });
        }
        Ok(f)
    }

    pub fn to_example(&self, n: usize) -> Result<Example, DataError> {
        Ok(Example {
            features: self.features(n)?,
            label: self.label,
        })
    }
}

/// Reduces every sample to `n` features, preserving order.
pub fn to_examples(samples: &[Sample], n: usize) -> Result<Vec<Example>, DataError> {
    use rayon::prelude::*;
    samples.par_iter().map(|s| s.to_example(n)).collect()
}
