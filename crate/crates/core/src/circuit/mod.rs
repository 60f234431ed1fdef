//! Circuits with symbolic parameter slots.

mod builders;
mod document;

pub use builders::{
    build_encoding_layer, build_mps_ansatz, scale_features, EncodingSpec, KernelGate, KernelSpec,
    Scaling,
};
pub use document::{CircuitDocument, FragmentAnnotation, FragmentRole, GateRecord, FORMAT_VERSION};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::statevector::{Gate, GateKind, SimError, StateVector};

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("gate {gate} references slot {slot}, but the slot table has {n_slots} entries")]
    DanglingSlot {
        gate: usize,
        slot: usize,
        n_slots: usize,
    },
    #[error("{role} slots: expected {expected} values, got {got}")]
    CountMismatch {
        role: SlotRole,
        expected: usize,
        got: usize,
    },
    #[error("circuit still has unbound slot {0}")]
    Unbound(usize),
    #[error("need at least one feature")]
    NoFeatures,
    #[error("cannot l2-normalize an all-zero feature vector")]
    ZeroNorm,
    #[error("an MPS ansatz needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),
    #[error("an MPS ansatz needs at least one layer")]
    NoLayers,
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("malformed circuit document: {0}")]
    Malformed(String),
    #[error("unsupported gate kind {0:?}")]
    UnknownGate(String),
    #[error("unsupported document version {0}")]
    Version(u32),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Role of a symbolic parameter slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotRole {
    Encoding,
    Trainable,
}

impl std::fmt::Display for SlotRole {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SlotRole::Encoding => "encoding",
            SlotRole::Trainable => "trainable",
        })
    }
}

/// A gate angle: either a literal or `scale · value(slot)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Literal(f64),
    Param { slot: usize, scale: f64 },
}

impl Angle {
    pub fn slot(slot: usize) -> Self {
        Angle::Param { slot, scale: 1.0 }
    }

    pub fn scaled(self, factor: f64) -> Self {
        match self {
            Angle::Literal(v) => Angle::Literal(v * factor),
            Angle::Param { slot, scale } => Angle::Param {
                slot,
                scale: scale * factor,
            },
        }
    }

    pub fn literal(&self) -> Option<f64> {
        match *self {
            Angle::Literal(v) => Some(v),
            Angle::Param { .. } => None,
        }
    }
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::Literal(v)
    }
}

/// A trainable-parameter occurrence in a gate, used for parameter-shift
/// bookkeeping: `d angle / d value(slot) = scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotOccurrence {
    pub gate: usize,
    pub slot: usize,
    pub role_index: usize,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate<Angle>>,
    slots: Vec<SlotRole>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self, CircuitError> {
        if n_qubits == 0 || n_qubits > crate::statevector::MAX_QUBITS {
            return Err(SimError::InvalidRegister(n_qubits).into());
        }
        Ok(Self {
            n_qubits,
            gates: Vec::new(),
            slots: Vec::new(),
        })
    }

    /// Builds a circuit from parts, checking every invariant.
    pub fn from_parts(
        n_qubits: usize,
        gates: Vec<Gate<Angle>>,
        slots: Vec<SlotRole>,
    ) -> Result<Self, CircuitError> {
        let mut c = Self::new(n_qubits)?;
        c.slots = slots;
        for gate in gates {
            c.push(gate)?;
        }
        Ok(c)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate<Angle>] {
        &self.gates
    }

    pub fn slots(&self) -> &[SlotRole] {
        &self.slots
    }

    pub fn add_slot(&mut self, role: SlotRole) -> usize {
        self.slots.push(role);
        self.slots.len() - 1
    }

    pub fn push(&mut self, gate: Gate<Angle>) -> Result<(), CircuitError> {
        gate.validate(self.n_qubits)?;
        if let Some(Angle::Param { slot, .. }) = gate.angle() {
            if *slot >= self.slots.len() {
                return Err(CircuitError::DanglingSlot {
                    gate: self.gates.len(),
                    slot: *slot,
                    n_slots: self.slots.len(),
                });
            }
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn slot_count(&self, role: SlotRole) -> usize {
        self.slots.iter().filter(|&&r| r == role).count()
    }

    /// Position of each slot within its role's value vector.
    fn role_indices(&self) -> Vec<usize> {
        let mut counters = [0usize; 2];
        self.slots
            .iter()
            .map(|r| {
                let c = &mut counters[*r as usize];
                *c += 1;
                *c - 1
            })
            .collect()
    }

    pub fn is_bound(&self) -> bool {
        self.gates
            .iter()
            .all(|g| !matches!(g.angle(), Some(Angle::Param { .. })))
    }

    /// Appends `other` after `self`. Slot ids of `other` are offset past
    /// this circuit's slot table.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit, CircuitError> {
        if other.n_qubits != self.n_qubits {
            return Err(SimError::QubitCountMismatch {
                observable: other.n_qubits,
                state: self.n_qubits,
            }
            .into());
        }
        let offset = self.slots.len();
        let mut out = self.clone();
        out.slots.extend_from_slice(&other.slots);
        out.gates.extend(other.gates.iter().map(|g| {
            g.map_angle(|a| match a {
                Angle::Param { slot, scale } => Angle::Param {
                    slot: slot + offset,
                    scale,
                },
                lit => lit,
            })
        }));
        Ok(out)
    }

    /// Replaces every symbolic slot with a literal angle. Encoding slots take
    /// values from `encoding` and trainable slots from `trainable`, each in
    /// slot-id order. The slot table is kept.
    ///
    /// A circuit without symbolic references accepts empty vectors and is
    /// returned unchanged.
    pub fn bind(&self, encoding: &[f64], trainable: &[f64]) -> Result<Circuit, CircuitError> {
        if self.is_bound() && encoding.is_empty() && trainable.is_empty() {
            return Ok(self.clone());
        }
        for (role, got) in [
            (SlotRole::Encoding, encoding.len()),
            (SlotRole::Trainable, trainable.len()),
        ] {
            let expected = self.slot_count(role);
            if expected != got {
                return Err(CircuitError::CountMismatch {
                    role,
                    expected,
                    got,
                });
            }
        }
        let role_index = self.role_indices();
        let gates = self
            .gates
            .iter()
            .map(|g| {
                g.map_angle(|a| match a {
                    Angle::Param { slot, scale } => {
                        let values = match self.slots[slot] {
                            SlotRole::Encoding => encoding,
                            SlotRole::Trainable => trainable,
                        };
                        Angle::Literal(scale * values[role_index[slot]])
                    }
                    lit => lit,
                })
            })
            .collect();
        Ok(Circuit {
            n_qubits: self.n_qubits,
            gates,
            slots: self.slots.clone(),
        })
    }

    /// Every gate angle that depends on a slot of `role`, in gate order.
    pub fn occurrences(&self, role: SlotRole) -> Vec<SlotOccurrence> {
        let role_index = self.role_indices();
        self.gates
            .iter()
            .enumerate()
            .filter_map(|(gate, g)| match g.angle() {
                Some(&Angle::Param { slot, scale }) if self.slots[slot] == role => {
                    Some(SlotOccurrence {
                        gate,
                        slot,
                        role_index: role_index[slot],
                        scale,
                    })
                }
                _ => None,
            })
            .collect()
    }

    /// Rewrites each `CRY(θ)` as `RY(θ/2)`, `CNOT`, `RY(−θ/2)`, `CNOT` on the
    /// same wires. The result has only single-qubit parametric gates.
    pub fn decompose_controlled_rotations(&self) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            match *g {
                Gate::Cry {
                    control,
                    target,
                    theta,
                } => {
                    gates.push(Gate::Ry {
                        target,
                        theta: theta.scaled(0.5),
                    });
                    gates.push(Gate::Cnot { control, target });
                    gates.push(Gate::Ry {
                        target,
                        theta: theta.scaled(-0.5),
                    });
                    gates.push(Gate::Cnot { control, target });
                }
                other => gates.push(other),
            }
        }
        Circuit {
            n_qubits: self.n_qubits,
            gates,
            slots: self.slots.clone(),
        }
    }

    /// Literal gate list of a bound circuit.
    pub fn literal_gates(&self) -> Result<Vec<Gate<f64>>, CircuitError> {
        self.gates
            .iter()
            .map(|g| {
                g.try_map_angle(|a| match a {
                    Angle::Literal(v) => Ok(v),
                    Angle::Param { slot, .. } => Err(CircuitError::Unbound(slot)),
                })
            })
            .collect()
    }

    /// Runs the bound circuit on `|0…0⟩`.
    pub fn simulate(&self) -> Result<StateVector, CircuitError> {
        let mut state = StateVector::zero(self.n_qubits)?;
        state.run(&self.literal_gates()?)?;
        Ok(state)
    }

    /// Copy with a literal added to the angle of gate `index`.
    pub fn shifted(&self, index: usize, delta: f64) -> Result<Circuit, CircuitError> {
        let mut out = self.clone();
        match out.gates.get_mut(index).and_then(|g| g.angle_mut()) {
            Some(Angle::Literal(v)) => *v += delta,
            Some(Angle::Param { slot, .. }) => return Err(CircuitError::Unbound(*slot)),
            None => {
                return Err(CircuitError::Malformed(format!(
                    "gate {index} has no angle to shift"
                )))
            }
        }
        Ok(out)
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    pub(crate) fn from_raw(n_qubits: usize, gates: Vec<Gate<Angle>>, slots: Vec<SlotRole>) -> Self {
        Self {
            n_qubits,
            gates,
            slots,
        }
    }
}
