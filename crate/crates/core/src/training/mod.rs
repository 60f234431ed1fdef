//! Hybrid quantum-classical classifier and its training loop.
//!
//! The forward pass binds a feature vector into the encoding layer, runs the
//! MPS ansatz (whole or cut), reads the `2^n` basis distribution and feeds it
//! to a linear softmax head. Angles are differentiated with the two-term
//! parameter-shift rule; CRY gates are decomposed into RY/CNOT first so every
//! trainable gate has a half-turn generator.

mod gradient;
mod model;
mod optim;
mod train;

pub use gradient::{
    batch_gradient, cross_entropy, example_gradient, parameter_shift_gradient, quantum_gradient,
    Gradients, PROB_FLOOR,
};
pub use model::{argmax, softmax, Backend, Model, ModelConfig};
pub use optim::{Adadelta, AdadeltaConfig};
pub use train::{evaluate, train, EpochLog, Evaluation, TrainConfig, TrainOutcome};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::CircuitError;
use crate::cutting::CutError;
use crate::statevector::GateKind;

/// A feature vector with its class label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub features: Vec<f64>,
    pub label: usize,
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("{what}: expected length {expected}, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("label {label} out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("trainable parameter on gate {gate} ({kind}) has no two-term shift rule")]
    NonShiftable { gate: usize, kind: GateKind },
    #[error("empty dataset")]
    EmptyDataset,
    #[error("invalid model configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Cut(#[from] CutError),
}
