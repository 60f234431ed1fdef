//! Single-wire circuit cutting.
//!
//! A cut on wire `w` replaces the wire with a measure-and-prepare channel
//! expanded over the Pauli basis. The upstream fragment measures `I, X, Y, Z`
//! on the cut wire; the downstream fragment starts its fresh wire in one of
//! the six Pauli eigenstates. Weighting the eight (observable, eigenstate)
//! pairs by `±1/2` and summing reproduces the uncut circuit exactly.

mod plan;
mod split;
mod terms;

pub use plan::{
    clamp_distribution, execute_downstream, execute_upstream, DownstreamOutput, DownstreamRequest,
    Execution, FragmentResults, ReconstructionPlan, UpstreamRequest,
};
pub use split::{split, CutSpec, Fragment, FragmentPair};
pub use terms::{cut_terms, CutTerm, CUT_TERMS};

use thiserror::Error;

use crate::circuit::{CircuitError, FragmentRole};
use crate::statevector::SimError;

#[derive(Debug, Error)]
pub enum CutError {
    #[error("cut wire {wire} out of range for {n_qubits} qubits")]
    WireOutOfRange { wire: usize, n_qubits: usize },
    #[error("cut position {position} out of range for {n_gates} gates")]
    PositionOutOfRange { position: usize, n_gates: usize },
    #[error("gate {gate} spans the cut")]
    SpansCut { gate: usize },
    #[error("circuit must be bound before cutting; slot {0} is symbolic")]
    Unbound(usize),
    #[error("expected a {expected:?} fragment, got {got:?}")]
    WrongRole {
        expected: FragmentRole,
        got: FragmentRole,
    },
    #[error("request size mismatch: expected {expected}, got {got}")]
    RequestSize { expected: usize, got: usize },
    #[error("invalid fragment document: {0}")]
    Document(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}
