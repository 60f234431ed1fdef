//! JSON circuit document.
//!
//! Angles and slot scales are decimal strings with 17 significant digits so
//! that a round trip reproduces every `f64` bit for bit.

use serde::{Deserialize, Serialize};

use super::{Angle, Circuit, CircuitError, SlotRole};
use crate::statevector::{Gate, GateKind};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub id: usize,
    pub role: SlotRole,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub kind: String,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FragmentRole {
    Upstream,
    Downstream,
}

/// Cut metadata attached to a fragment document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentAnnotation {
    pub role: FragmentRole,
    pub cut_wire: usize,
    pub cut_position: usize,
    pub source_n_qubits: usize,
    /// Original qubit index of each fragment qubit. The downstream fragment's
    /// fresh wire maps to the cut wire.
    pub qubit_map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitDocument {
    pub version: u32,
    pub n_qubits: usize,
    pub gates: Vec<GateRecord>,
    pub slots: Vec<SlotRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fragment: Option<FragmentAnnotation>,
}

pub(crate) fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64, CircuitError> {
    s.trim()
        .parse()
        .map_err(|_| CircuitError::Malformed(format!("{what} {s:?} is not a decimal number")))
}

impl From<&Circuit> for CircuitDocument {
    fn from(c: &Circuit) -> Self {
        let gates = c
            .gates()
            .iter()
            .map(|g| {
                let mut rec = GateRecord {
                    kind: g.kind().name().to_string(),
                    qubits: g.qubits(),
                    angle: None,
                    slot: None,
                    scale: None,
                };
                match g.angle() {
                    Some(Angle::Literal(v)) => rec.angle = Some(format_f64(*v)),
                    Some(&Angle::Param { slot, scale }) => {
                        rec.slot = Some(slot);
                        if scale != 1.0 {
                            rec.scale = Some(format_f64(scale));
                        }
                    }
                    None => {}
                }
                rec
            })
            .collect();
        let slots = c
            .slots()
            .iter()
            .enumerate()
            .map(|(id, &role)| SlotRecord { id, role })
            .collect();
        CircuitDocument {
            version: FORMAT_VERSION,
            n_qubits: c.n_qubits(),
            gates,
            slots,
            fragment: None,
        }
    }
}

impl GateRecord {
    fn to_gate(&self) -> Result<Gate<Angle>, CircuitError> {
        let kind: GateKind = self.kind.parse().map_err(CircuitError::UnknownGate)?;
        if self.qubits.len() != kind.arity() {
            return Err(CircuitError::Malformed(format!(
                "{kind} takes {} qubit(s), got {}",
                kind.arity(),
                self.qubits.len()
            )));
        }
        let angle = match (kind.is_parametric(), &self.angle, self.slot) {
            (true, Some(a), None) => {
                if self.scale.is_some() {
                    return Err(CircuitError::Malformed(
                        "scale given for a literal angle".into(),
                    ));
                }
                Some(Angle::Literal(parse_f64(a, "angle")?))
            }
            (true, None, Some(slot)) => {
                let scale = match &self.scale {
                    Some(s) => parse_f64(s, "scale")?,
                    None => 1.0,
                };
                Some(Angle::Param { slot, scale })
            }
            (true, _, _) => {
                return Err(CircuitError::Malformed(format!(
                    "{kind} needs exactly one of angle or slot"
                )))
            }
            (false, None, None) if self.scale.is_none() => None,
            (false, _, _) => {
                return Err(CircuitError::Malformed(format!("{kind} takes no angle")));
            }
        };
        let q = &self.qubits;
        Ok(match (kind, angle) {
            (GateKind::H, _) => Gate::H { target: q[0] },
            (GateKind::Ry, Some(theta)) => Gate::Ry {
                target: q[0],
                theta,
            },
            (GateKind::Rz, Some(phi)) => Gate::Rz { target: q[0], phi },
            (GateKind::Cry, Some(theta)) => Gate::Cry {
                control: q[0],
                target: q[1],
                theta,
            },
            (GateKind::Cnot, _) => Gate::Cnot {
                control: q[0],
                target: q[1],
            },
            _ => unreachable!("parametric gates always carry an angle here"),
        })
    }
}

impl CircuitDocument {
    pub fn to_circuit(&self) -> Result<Circuit, CircuitError> {
        if self.version != FORMAT_VERSION {
            return Err(CircuitError::Version(self.version));
        }
        let mut slots = Vec::with_capacity(self.slots.len());
        for (i, rec) in self.slots.iter().enumerate() {
            if rec.id != i {
                return Err(CircuitError::Malformed(format!(
                    "slot ids must be 0..n in order; entry {i} has id {}",
                    rec.id
                )));
            }
            slots.push(rec.role);
        }
        let gates = self
            .gates
            .iter()
            .map(GateRecord::to_gate)
            .collect::<Result<Vec<_>, _>>()?;
        Circuit::from_parts(self.n_qubits, gates, slots)
    }

    pub fn to_json(&self) -> Result<String, CircuitError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, CircuitError> {
        serde_json::from_str(text).map_err(|e| CircuitError::Malformed(e.to_string()))
    }
}

impl Circuit {
    pub fn to_document(&self) -> CircuitDocument {
        CircuitDocument::from(self)
    }

    pub fn serialize(&self) -> Result<String, CircuitError> {
        self.to_document().to_json()
    }

    pub fn deserialize(text: &str) -> Result<Circuit, CircuitError> {
        CircuitDocument::from_json(text)?.to_circuit()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_encoding_layer, build_mps_ansatz, EncodingSpec, KernelSpec};

    #[test]
    fn empty_round_trip() {
        let c = Circuit::new(1).unwrap();
        assert_eq!(Circuit::deserialize(&c.serialize().unwrap()).unwrap(), c);
    }

    #[test]
    fn ansatz_round_trip_keeps_roles() {
        let enc = build_encoding_layer(&EncodingSpec::new(8)).unwrap();
        let c = enc
            .compose(&build_mps_ansatz(8, &KernelSpec::default(), 1).unwrap())
            .unwrap()
            .decompose_controlled_rotations();
        let back = Circuit::deserialize(&c.serialize().unwrap()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.slot_count(SlotRole::Encoding), 8);
        assert_eq!(back.slot_count(SlotRole::Trainable), 28);
    }

    #[test]
    fn literal_angles_are_bit_exact() {
        let mut c = Circuit::new(1).unwrap();
        for v in [0.1, std::f64::consts::PI, -1e-300, 1.0 / 3.0, 123456.789e10] {
            c.push(Gate::Rz {
                target: 0,
                phi: Angle::Literal(v),
            })
            .unwrap();
        }
        let back = Circuit::deserialize(&c.serialize().unwrap()).unwrap();
        for (a, b) in c.gates().iter().zip(back.gates()) {
            let (x, y) = (
                a.angle().unwrap().literal().unwrap(),
                b.angle().unwrap().literal().unwrap(),
            );
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn unknown_kind_rejected() {
        let doc = r#"{"version":1,"n_qubits":1,"slots":[],
            "gates":[{"kind":"RX","qubits":[0],"angle":"0.5"}]}"#;
        assert!(matches!(
            Circuit::deserialize(doc),
            Err(CircuitError::UnknownGate(k)) if k == "RX"
        ));
    }

    #[test]
    fn dangling_slot_rejected() {
        let doc = r#"{"version":1,"n_qubits":1,"slots":[],
            "gates":[{"kind":"RY","qubits":[0],"slot":3}]}"#;
        assert!(matches!(
            Circuit::deserialize(doc),
            Err(CircuitError::DanglingSlot { slot: 3, .. })
        ));
    }

    #[test]
    fn malformed_documents() {
        for doc in [
            "not json",
            r#"{"version":1,"n_qubits":1,"slots":[],"gates":[{"kind":"RY","qubits":[0]}]}"#,
            r#"{"version":1,"n_qubits":1,"slots":[],"gates":[{"kind":"H","qubits":[0],"angle":"1"}]}"#,
            r#"{"version":1,"n_qubits":2,"slots":[],"gates":[{"kind":"CNOT","qubits":[0]}]}"#,
            r#"{"version":1,"n_qubits":1,"slots":[],"gates":[{"kind":"RZ","qubits":[0],"angle":"x"}]}"#,
            r#"{"version":1,"n_qubits":1,"slots":[{"id":1,"role":"encoding"}],"gates":[]}"#,
        ] {
            assert!(Circuit::deserialize(doc).is_err(), "{doc}");
        }
        let doc = r#"{"version":9,"n_qubits":1,"slots":[],"gates":[]}"#;
        assert!(matches!(
            Circuit::deserialize(doc),
            Err(CircuitError::Version(9))
        ));
    }
}
