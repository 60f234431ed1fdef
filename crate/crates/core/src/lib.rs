//! Distributed hybrid quantum convolutional neural network toolkit.
//!
//! - [`statevector`]: exact pure-state simulation (qubit 0 is the MSB).
//! - [`circuit`]: circuits with encoding/trainable slots, the angle-encoding
//!   layer, the MPS-ladder ansatz and a JSON document format.
//! - [`cutting`]: single-wire cutting and exact Pauli-basis reconstruction.
//! - [`training`]: the hybrid model, parameter-shift gradients and Adadelta.
//! - [`data`]: ingestion, the band-mean image reducer, augmentation, splits.
//! - [`metrics`]: confusion matrices and per-class evaluation metrics.

pub mod circuit;
pub mod cutting;
pub mod data;
pub mod metrics;
pub mod statevector;
pub mod training;

pub use circuit::{Circuit, CircuitError};
pub use cutting::{CutError, CutSpec, ReconstructionPlan};
pub use statevector::{Gate, Pauli, PauliString, StateVector};
