use std::fs;
use std::path::Path;

use dqcnn_core::training::{Adadelta, Model, ModelConfig};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CliResult};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Trained parameters plus everything needed to resume or evaluate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Checkpoint {
    pub version: u32,
    pub model: ModelConfig,
    pub class_names: Vec<String>,
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub optimizer: Adadelta,
    pub seed: u64,
    pub epochs: usize,
    /// SHA-256 of the resolved run config that produced this checkpoint.
    pub config_sha256: String,
}

impl Checkpoint {
    pub fn new(
        model: &Model,
        optimizer: Adadelta,
        class_names: Vec<String>,
        seed: u64,
        epochs: usize,
        config_sha256: String,
    ) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            model: model.config().clone(),
            class_names,
            theta: model.theta.clone(),
            weights: model.weights.clone(),
            bias: model.bias.clone(),
            optimizer,
            seed,
            epochs,
            config_sha256,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read checkpoint {}: {e}", path.display())))?;
        let ck: Self = serde_json::from_str(&text)
            .map_err(|e| invalid(format!("checkpoint {}: {e}", path.display())))?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(invalid(format!(
                "unsupported checkpoint version {}",
                ck.version
            )));
        }
        Ok(ck)
    }

    pub fn to_model(&self) -> CliResult<Model> {
        Ok(Model::from_parameters(
            self.model.clone(),
            self.theta.clone(),
            self.weights.clone(),
            self.bias.clone(),
        )?)
    }
}
