use serde::{Deserialize, Serialize};

use super::CutError;
use crate::circuit::{Angle, Circuit, CircuitDocument, FragmentAnnotation, FragmentRole};
use crate::statevector::Gate;

/// Location of a single wire cut. The cut sits on `wire` between gate
/// `position - 1` and gate `position` of the source circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutSpec {
    pub wire: usize,
    pub position: usize,
}

impl CutSpec {
    /// Places the cut on `wire` right after the last gate that touches the
    /// wire while staying on qubits `0..=wire`.
    ///
    /// For the MPS ladder this is just after the kernel on `(wire-1, wire)`.
    pub fn after_last_upstream_gate(circuit: &Circuit, wire: usize) -> Result<CutSpec, CutError> {
        if wire >= circuit.n_qubits() {
            return Err(CutError::WireOutOfRange {
                wire,
                n_qubits: circuit.n_qubits(),
            });
        }
        let position = circuit
            .gates()
            .iter()
            .rposition(|g| g.touches(wire) && g.qubits().iter().all(|&q| q <= wire))
            .map_or(0, |i| i + 1);
        let cut = CutSpec { wire, position };
        // Surface a spanning gate here rather than at split time.
        partition(circuit, cut)?;
        Ok(cut)
    }
}

/// One side of a cut circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub role: FragmentRole,
    pub circuit: Circuit,
    pub cut: CutSpec,
    pub source_n_qubits: usize,
}

impl Fragment {
    pub fn n_qubits(&self) -> usize {
        self.circuit.n_qubits()
    }

    /// Original qubit index of each fragment qubit.
    pub fn qubit_map(&self) -> Vec<usize> {
        match self.role {
            FragmentRole::Upstream => (0..=self.cut.wire).collect(),
            FragmentRole::Downstream => (self.cut.wire..self.source_n_qubits).collect(),
        }
    }

    pub fn to_document(&self) -> CircuitDocument {
        let mut doc = self.circuit.to_document();
        doc.fragment = Some(FragmentAnnotation {
            role: self.role,
            cut_wire: self.cut.wire,
            cut_position: self.cut.position,
            source_n_qubits: self.source_n_qubits,
            qubit_map: self.qubit_map(),
        });
        doc
    }

    pub fn from_document(doc: &CircuitDocument) -> Result<Fragment, CutError> {
        let ann = doc
            .fragment
            .as_ref()
            .ok_or_else(|| CutError::Document("missing fragment section".into()))?;
        let fragment = Fragment {
            role: ann.role,
            circuit: doc.to_circuit()?,
            cut: CutSpec {
                wire: ann.cut_wire,
                position: ann.cut_position,
            },
            source_n_qubits: ann.source_n_qubits,
        };
        if fragment.cut.wire >= fragment.source_n_qubits {
            return Err(CutError::Document(
                "cut wire outside source register".into(),
            ));
        }
        let expected = fragment.qubit_map();
        if expected.len() != fragment.n_qubits() || ann.qubit_map != expected {
            return Err(CutError::Document(format!(
                "{:?} fragment qubit map {:?} does not match cut annotation",
                ann.role, ann.qubit_map
            )));
        }
        Ok(fragment)
    }
}

/// Upstream and downstream fragments of a single-wire cut.
///
/// The upstream fragment holds qubits `0..=wire` with the cut wire last.
/// The downstream fragment holds a fresh wire (its qubit 0, standing in for
/// the cut wire) followed by qubits `wire+1..n`.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentPair {
    pub upstream: Fragment,
    pub downstream: Fragment,
}

impl FragmentPair {
    pub fn cut(&self) -> CutSpec {
        self.upstream.cut
    }

    pub fn source_n_qubits(&self) -> usize {
        self.upstream.source_n_qubits
    }

    pub fn to_documents(&self) -> (CircuitDocument, CircuitDocument) {
        (self.upstream.to_document(), self.downstream.to_document())
    }

    pub fn from_documents(
        upstream: &CircuitDocument,
        downstream: &CircuitDocument,
    ) -> Result<FragmentPair, CutError> {
        let upstream = Fragment::from_document(upstream)?;
        let downstream = Fragment::from_document(downstream)?;
        if upstream.role != FragmentRole::Upstream || downstream.role != FragmentRole::Downstream {
            return Err(CutError::Document("fragment roles out of order".into()));
        }
        if upstream.cut != downstream.cut || upstream.source_n_qubits != downstream.source_n_qubits
        {
            return Err(CutError::Document(
                "fragments come from different cuts".into(),
            ));
        }
        Ok(FragmentPair {
            upstream,
            downstream,
        })
    }
}

type Partition = (Vec<Gate<Angle>>, Vec<Gate<Angle>>);

/// Assigns every gate to a side of the cut without looking at angles.
fn partition(circuit: &Circuit, cut: CutSpec) -> Result<Partition, CutError> {
    let n = circuit.n_qubits();
    let CutSpec { wire, position } = cut;
    if wire >= n {
        return Err(CutError::WireOutOfRange { wire, n_qubits: n });
    }
    if position > circuit.gates().len() {
        return Err(CutError::PositionOutOfRange {
            position,
            n_gates: circuit.gates().len(),
        });
    }
    let mut up = Vec::new();
    let mut down = Vec::new();
    for (i, g) in circuit.gates().iter().enumerate() {
        let qubits = g.qubits();
        let lo = *qubits.iter().min().expect("gates touch at least one qubit");
        let hi = *qubits.iter().max().expect("gates touch at least one qubit");
        let upstream_side = if hi < wire {
            true
        } else if lo > wire {
            false
        } else if i < position && hi == wire {
            true
        } else if i >= position && lo == wire {
            false
        } else {
            return Err(CutError::SpansCut { gate: i });
        };
        if upstream_side {
            up.push(*g);
        } else {
            down.push(g.map_qubits(|q| q - wire));
        }
    }
    Ok((up, down))
}

/// Splits a bound circuit at `cut`.
///
/// Gates entirely on qubits below the wire go upstream and gates entirely
/// above it go downstream, wherever they sit in the sequence. Gates on the
/// wire go upstream before the cut and downstream after it. Any gate that
/// connects qubits on both sides of the cut is rejected.
pub fn split(circuit: &Circuit, cut: CutSpec) -> Result<FragmentPair, CutError> {
    let (up, down) = partition(circuit, cut)?;
    if let Some(slot) = circuit.gates().iter().find_map(|g| match g.angle() {
        Some(Angle::Param { slot, .. }) => Some(*slot),
        _ => None,
    }) {
        return Err(CutError::Unbound(slot));
    }
    let n = circuit.n_qubits();
    let wire = cut.wire;

    let upstream = Circuit::from_raw(wire + 1, up, circuit.slots().to_vec());
    let downstream = Circuit::from_raw(n - wire, down, circuit.slots().to_vec());
    Ok(FragmentPair {
        upstream: Fragment {
            role: FragmentRole::Upstream,
            circuit: upstream,
            cut,
            source_n_qubits: n,
        },
        downstream: Fragment {
            role: FragmentRole::Downstream,
            circuit: downstream,
            cut,
            source_n_qubits: n,
        },
    })
}
