use serde::{Deserialize, Serialize};

use super::{Angle, Circuit, CircuitError, SlotRole};
use crate::statevector::{Gate, GateKind};

/// Optional feature preprocessing applied before angle binding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    #[default]
    None,
    L2Normalize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub n_features: usize,
    #[serde(default)]
    pub scaling: Scaling,
}

impl EncodingSpec {
    pub fn new(n_features: usize) -> Self {
        Self {
            n_features,
            scaling: Scaling::None,
        }
    }

    pub fn apply_scaling(&self, features: &[f64]) -> Result<Vec<f64>, CircuitError> {
        match self.scaling {
            Scaling::None => Ok(features.to_vec()),
            Scaling::L2Normalize => scale_features(features),
        }
    }
}

/// Divides `x` by its Euclidean norm `C = sqrt(Σ x_i²)`.
pub fn scale_features(x: &[f64]) -> Result<Vec<f64>, CircuitError> {
    if x.is_empty() {
        return Err(CircuitError::NoFeatures);
    }
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(CircuitError::ZeroNorm);
    }
    Ok(x.iter().map(|v| v / norm).collect())
}

/// Angle encoding: `H` then `RY(x_i)` on every qubit `i`, with one encoding
/// slot per qubit.
pub fn build_encoding_layer(spec: &EncodingSpec) -> Result<Circuit, CircuitError> {
    if spec.n_features == 0 {
        return Err(CircuitError::NoFeatures);
    }
    let mut c = Circuit::new(spec.n_features)?;
    for q in 0..spec.n_features {
        let slot = c.add_slot(SlotRole::Encoding);
        c.push(Gate::H { target: q })?;
        c.push(Gate::Ry {
            target: q,
            theta: Angle::slot(slot),
        })?;
    }
    Ok(c)
}

/// Two-wire variational kernel. Gates act on local wires 0 and 1; the angle
/// of each parametric gate is an index into the kernel's parameter list.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    template: Vec<Gate<usize>>,
    parameter_count: usize,
}

impl KernelSpec {
    pub fn new(template: Vec<Gate<usize>>) -> Result<Self, CircuitError> {
        let mut used = Vec::new();
        for g in &template {
            if g.kind() == GateKind::H {
                return Err(CircuitError::InvalidKernel("H is not a kernel gate".into()));
            }
            g.validate(2)
                .map_err(|e| CircuitError::InvalidKernel(e.to_string()))?;
            if let Some(&p) = g.angle() {
                used.push(p);
            }
        }
        used.sort_unstable();
        used.dedup();
        if used.iter().enumerate().any(|(i, &p)| i != p) {
            return Err(CircuitError::InvalidKernel(
                "parameter indices must be dense from 0".into(),
            ));
        }
        Ok(Self {
            template,
            parameter_count: used.len(),
        })
    }

    pub fn parameter_count(&self) -> usize {
        self.parameter_count
    }

    pub fn template(&self) -> &[Gate<usize>] {
        &self.template
    }
}

/// Serializable form of one kernel gate: `wires` are local (0 or 1) and
/// `param` indexes the kernel's parameter list for parametric gates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelGate {
    pub gate: GateKind,
    pub wires: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub param: Option<usize>,
}

impl KernelSpec {
    pub fn from_records(records: &[KernelGate]) -> Result<Self, CircuitError> {
        let bad = |msg: String| CircuitError::InvalidKernel(msg);
        let template = records
            .iter()
            .map(|r| {
                if r.wires.len() != r.gate.arity() {
                    return Err(bad(format!("{} takes {} wire(s)", r.gate, r.gate.arity())));
                }
                let p = match (r.gate.is_parametric(), r.param) {
                    (true, Some(p)) => p,
                    (false, None) => 0,
                    (true, None) => return Err(bad(format!("{} needs a param index", r.gate))),
                    (false, Some(_)) => return Err(bad(format!("{} takes no parameter", r.gate))),
                };
                let w = &r.wires;
                Ok(match r.gate {
                    GateKind::H => Gate::H { target: w[0] },
                    GateKind::Ry => Gate::Ry {
                        target: w[0],
                        theta: p,
                    },
                    GateKind::Rz => Gate::Rz {
                        target: w[0],
                        phi: p,
                    },
                    GateKind::Cry => Gate::Cry {
                        control: w[0],
                        target: w[1],
                        theta: p,
                    },
                    GateKind::Cnot => Gate::Cnot {
                        control: w[0],
                        target: w[1],
                    },
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(template)
    }
}

impl Default for KernelSpec {
    /// `RY(a)` on wire 0, `RY(b)` on wire 1, `CNOT(0→1)`, `RZ(c)` on wire 1,
    /// `CRY(d)(0→1)`.
    fn default() -> Self {
        Self::new(vec![
            Gate::Ry {
                target: 0,
                theta: 0,
            },
            Gate::Ry {
                target: 1,
                theta: 1,
            },
            Gate::Cnot {
                control: 0,
                target: 1,
            },
            Gate::Rz { target: 1, phi: 2 },
            Gate::Cry {
                control: 0,
                target: 1,
                theta: 3,
            },
        ])
        .expect("default kernel is valid")
    }
}

/// MPS ladder: one kernel on each adjacent pair `(q_i, q_{i+1})`, ascending,
/// repeated `layers` times. Each kernel instance gets fresh trainable slots.
pub fn build_mps_ansatz(
    n_qubits: usize,
    kernel: &KernelSpec,
    layers: usize,
) -> Result<Circuit, CircuitError> {
    if n_qubits < 2 {
        return Err(CircuitError::TooFewQubits(n_qubits));
    }
    if layers == 0 {
        return Err(CircuitError::NoLayers);
    }
    let mut c = Circuit::new(n_qubits)?;
    for _ in 0..layers {
        for i in 0..n_qubits - 1 {
            let slots: Vec<usize> = (0..kernel.parameter_count())
                .map(|_| c.add_slot(SlotRole::Trainable))
                .collect();
            for g in kernel.template() {
                let placed = g.map_qubits(|w| i + w).map_angle(|p| Angle::slot(slots[p]));
                c.push(placed)?;
            }
        }
    }
    Ok(c)
}
