//! Turns the `[data]` section into labelled example splits.

use dqcnn_core::data::{
    augment, ingest, split, synthetic::angle_clusters, to_examples, DatasetManifest, Sample,
    SampleData, Split,
};
use dqcnn_core::training::Example;

use crate::config::RunConfig;
use crate::error::{invalid, CliResult};

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub class_names: Vec<String>,
    pub splits: Vec<(Split, Vec<Example>)>,
}

impl Dataset {
    pub fn get(&self, which: Split) -> Option<&[Example]> {
        self.splits
            .iter()
            .find(|(s, _)| *s == which)
            .map(|(_, e)| e.as_slice())
    }

    pub fn train(&self) -> &[Example] {
        self.get(Split::Train)
            .expect("every split layout has a train part")
    }

    /// Validation split if present, else test.
    pub fn held_out(&self) -> (Split, &[Example]) {
        let (s, e) = self
            .splits
            .iter()
            .find(|(s, _)| *s == Split::Validation)
            .or_else(|| self.splits.iter().find(|(s, _)| *s == Split::Test))
            .expect("every split layout has a held-out part");
        (*s, e)
    }

    pub fn all(&self) -> Vec<Example> {
        self.splits
            .iter()
            .flat_map(|(_, e)| e.iter().cloned())
            .collect()
    }
}

pub fn load(cfg: &RunConfig) -> CliResult<Dataset> {
    cfg.validate_data()?;
    let n = cfg.model.n_qubits;
    if let Some(s) = &cfg.data.synthetic {
        let samples = angle_clusters(s.n_samples, n, s.n_classes, s.seed)
            .into_iter()
            .enumerate()
            .map(|(i, ex)| Sample {
                data: SampleData::Features(ex.features),
                label: ex.label,
                source: format!("synthetic{i}"),
                split: None,
            })
            .collect();
        let parts = split(samples, &s.split_ratios, s.seed)?;
        return finish(
            "synthetic".into(),
            (0..s.n_classes).map(|c| format!("class{c}")).collect(),
            parts,
            n,
        );
    }
    let path = cfg.data.manifest.as_ref().expect("validated above");
    let manifest = DatasetManifest::load(path)?;
    if manifest.class_names.len() != cfg.model.n_classes {
        return Err(invalid(format!(
            "manifest lists {} classes, model has {}",
            manifest.class_names.len(),
            cfg.model.n_classes
        )));
    }
    let mut samples = ingest(&manifest)?;
    if let Some(aug) = &manifest.augmentation {
        samples = augment(samples, aug.target_per_class, aug.seed, aug.allow_subsample)?;
    }
    let parts = split(samples, &manifest.split_ratios, manifest.seed)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    finish(name, manifest.class_names, parts, n)
}

fn finish(
    name: String,
    class_names: Vec<String>,
    parts: Vec<Vec<Sample>>,
    n: usize,
) -> CliResult<Dataset> {
    let layout = Split::for_count(parts.len());
    let splits = layout
        .iter()
        .zip(parts)
        .map(|(&s, samples)| Ok((s, to_examples(&samples, n)?)))
        .collect::<CliResult<_>>()?;
    Ok(Dataset {
        name,
        class_names,
        splits,
    })
}
