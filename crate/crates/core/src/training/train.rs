use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gradient::{batch_gradient, cross_entropy};
use super::model::{argmax, Model};
use super::optim::{Adadelta, AdadeltaConfig};
use super::{Example, TrainError};

fn default_epochs() -> usize {
    50
}

fn default_batch() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default)]
    pub optimizer: AdadeltaConfig,
    /// Seeds parameter initialization and per-epoch shuffling.
    #[serde(default)]
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: default_epochs(),
            batch_size: default_batch(),
            optimizer: AdadeltaConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub split: String,
    pub loss: f64,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub loss: f64,
    pub accuracy: f64,
    /// Class probabilities per example.
    pub scores: Vec<Vec<f64>>,
    pub predictions: Vec<usize>,
}

/// Forward pass over a data set.
pub fn evaluate(model: &Model, examples: &[Example]) -> Result<Evaluation, TrainError> {
    if examples.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let scores = examples
        .par_iter()
        .map(|ex| model.forward(&ex.features))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<usize> = examples.iter().map(|e| e.label).collect();
    let loss = cross_entropy(&scores, &labels)?;
    let predictions: Vec<usize> = scores.iter().map(|s| argmax(s)).collect();
    let correct = predictions
        .iter()
        .zip(&labels)
        .filter(|(p, y)| p == y)
        .count();
    Ok(Evaluation {
        loss,
        accuracy: correct as f64 / examples.len() as f64,
        scores,
        predictions,
    })
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: Model,
    pub optimizer: Adadelta,
    pub log: Vec<EpochLog>,
}

/// Mini-batch training with Adadelta.
///
/// Each epoch reshuffles the training set from a stream seeded by
/// `config.seed`, steps once per batch, then logs loss and accuracy of the
/// updated model on the full training set and, when given, on the named
/// evaluation set.
pub fn train(
    model: Model,
    train_set: &[Example],
    eval: Option<(&str, &[Example])>,
    config: &TrainConfig,
) -> Result<TrainOutcome, TrainError> {
    if train_set.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    if config.batch_size == 0 {
        return Err(TrainError::Config("batch size must be positive".into()));
    }
    let eval = eval.filter(|(_, e)| !e.is_empty());
    for ex in train_set.iter().chain(eval.map_or(&[][..], |(_, e)| e)) {
        if ex.label >= model.n_classes() {
            return Err(TrainError::LabelOutOfRange {
                label: ex.label,
                n_classes: model.n_classes(),
            });
        }
    }
    let mut model = model;
    let mut optimizer = Adadelta::new(config.optimizer, model.n_parameters());
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut log = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<Example> = chunk.iter().map(|&i| train_set[i].clone()).collect();
            let grads = batch_gradient(&model, &batch)?;
            let mut params = model.parameters();
            optimizer.step(&mut params, &grads.flatten())?;
            model.set_parameters(&params)?;
        }
        let e = evaluate(&model, train_set)?;
        log.push(EpochLog {
            epoch,
            split: "train".into(),
            loss: e.loss,
            accuracy: e.accuracy,
        });
        if let Some((name, examples)) = eval {
            let e = evaluate(&model, examples)?;
            log.push(EpochLog {
                epoch,
                split: name.into(),
                loss: e.loss,
                accuracy: e.accuracy,
            });
        }
    }
    Ok(TrainOutcome {
        model,
        optimizer,
        log,
    })
}
