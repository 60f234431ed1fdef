use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TrainError;
use crate::circuit::{
    build_encoding_layer, build_mps_ansatz, Circuit, EncodingSpec, KernelGate, KernelSpec, Scaling,
    SlotRole,
};
use crate::cutting::{clamp_distribution, split, CutSpec, ReconstructionPlan};

fn default_qubits() -> usize {
    8
}
fn default_layers() -> usize {
    1
}
fn default_classes() -> usize {
    2
}

/// Architecture of the hybrid model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_qubits")]
    pub n_qubits: usize,
    #[serde(default = "default_layers")]
    pub layers: usize,
    #[serde(default = "default_classes")]
    pub n_classes: usize,
    #[serde(default)]
    pub scaling: Scaling,
    /// Custom two-wire kernel; the built-in 4-parameter kernel when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel: Option<Vec<KernelGate>>,
    /// Run the quantum layer as two cut fragments instead of one circuit.
    #[serde(default)]
    pub cut: bool,
    /// Defaults to `n_qubits / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_wire: Option<usize>,
    /// Gate index in the executable (CRY-decomposed) circuit. Defaults to
    /// just after the last gate on the wire that stays on qubits `0..=wire`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_position: Option<usize>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n_qubits: default_qubits(),
            layers: default_layers(),
            n_classes: default_classes(),
            scaling: Scaling::None,
            kernel: None,
            cut: false,
            cut_wire: None,
            cut_position: None,
        }
    }
}

/// How the quantum layer's output distribution is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Simulate the whole register.
    Exact,
    /// Execute the two fragments of a single-wire cut and recombine.
    Cut(CutSpec),
}

impl Backend {
    /// Computational-basis distribution of a bound circuit.
    pub fn distribution(&self, bound: &Circuit) -> Result<Vec<f64>, TrainError> {
        match *self {
            Backend::Exact => Ok(bound.simulate()?.probabilities()),
            Backend::Cut(cut) => {
                let plan = ReconstructionPlan::new(split(bound, cut)?);
                Ok(clamp_distribution(plan.reconstruct_probabilities()?))
            }
        }
    }
}

/// Quantum feature map plus a fully connected softmax head.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    config: ModelConfig,
    encoding: EncodingSpec,
    circuit: Circuit,
    cut: Option<CutSpec>,
    /// Trainable rotation angles, in slot order.
    pub theta: Vec<f64>,
    /// Head weights, `n_classes × 2^n_qubits`, row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Model {
    /// Builds the circuit and draws initial parameters from `seed`.
    ///
    /// Angles are uniform in `[−π, π)`; head entries uniform in `[−k, k]`
    /// with `k = 1/sqrt(2^n)`.
    pub fn new(config: ModelConfig, seed: u64) -> Result<Self, TrainError> {
        let (encoding, circuit, cut) = Self::build(&config)?;
        let dim = 1usize << config.n_qubits;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_theta = circuit.slot_count(SlotRole::Trainable);
        let theta = (0..n_theta).map(|_| rng.gen_range(-PI..PI)).collect();
        let k = 1.0 / (dim as f64).sqrt();
        let weights = (0..config.n_classes * dim)
            .map(|_| rng.gen_range(-k..=k))
            .collect();
        let bias = (0..config.n_classes)
            .map(|_| rng.gen_range(-k..=k))
            .collect();
        Ok(Self {
            config,
            encoding,
            circuit,
            cut,
            theta,
            weights,
            bias,
        })
    }

    /// Rebuilds a model from stored parameters.
    pub fn from_parameters(
        config: ModelConfig,
        theta: Vec<f64>,
        weights: Vec<f64>,
        bias: Vec<f64>,
    ) -> Result<Self, TrainError> {
        let (encoding, circuit, cut) = Self::build(&config)?;
        let dim = 1usize << config.n_qubits;
        let expect = [
            (
                "theta",
                circuit.slot_count(SlotRole::Trainable),
                theta.len(),
            ),
            ("weights", config.n_classes * dim, weights.len()),
            ("bias", config.n_classes, bias.len()),
        ];
        for (what, expected, got) in expect {
            if expected != got {
                return Err(TrainError::Shape {
                    what,
                    expected,
                    got,
                });
            }
        }
        Ok(Self {
            config,
            encoding,
            circuit,
            cut,
            theta,
            weights,
            bias,
        })
    }

    fn build(config: &ModelConfig) -> Result<(EncodingSpec, Circuit, Option<CutSpec>), TrainError> {
        if config.n_classes < 2 {
            return Err(TrainError::Config("need at least two classes".into()));
        }
        if config.n_qubits > 12 {
            return Err(TrainError::Config(format!(
                "{} qubits gives a {}-wide head; at most 12 supported",
                config.n_qubits,
                1usize << config.n_qubits
            )));
        }
        let encoding = EncodingSpec {
            n_features: config.n_qubits,
            scaling: config.scaling,
        };
        let kernel = match &config.kernel {
            Some(records) => KernelSpec::from_records(records)?,
            None => KernelSpec::default(),
        };
        let ansatz = build_mps_ansatz(config.n_qubits, &kernel, config.layers)?;
        let circuit = build_encoding_layer(&encoding)?
            .compose(&ansatz)?
            .decompose_controlled_rotations();
        let cut = if config.cut {
            let wire = config.cut_wire.unwrap_or(config.n_qubits / 2);
            let cut = match config.cut_position {
                Some(position) => CutSpec { wire, position },
                None => CutSpec::after_last_upstream_gate(&circuit, wire)?,
            };
            // Validate against a bound copy; split rejects symbolic circuits.
            let zeros = circuit.bind(
                &vec![0.0; config.n_qubits],
                &vec![0.0; circuit.slot_count(SlotRole::Trainable)],
            )?;
            split(&zeros, cut)?;
            Some(cut)
        } else {
            None
        };
        Ok((encoding, circuit, cut))
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    /// Encoding layer followed by the ansatz, with CRY gates decomposed.
    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn cut(&self) -> Option<CutSpec> {
        self.cut
    }

    pub fn backend(&self) -> Backend {
        self.cut.map_or(Backend::Exact, Backend::Cut)
    }

    /// Copy of the model with cutting switched on or off. Parameters are kept.
    pub fn with_cut(&self, enabled: bool) -> Result<Self, TrainError> {
        let mut config = self.config.clone();
        config.cut = enabled;
        Self::from_parameters(
            config,
            self.theta.clone(),
            self.weights.clone(),
            self.bias.clone(),
        )
    }

    pub fn n_classes(&self) -> usize {
        self.config.n_classes
    }

    /// Width of the head input, `2^n_qubits`.
    pub fn feature_dim(&self) -> usize {
        1 << self.config.n_qubits
    }

    pub fn n_parameters(&self) -> usize {
        self.theta.len() + self.weights.len() + self.bias.len()
    }

    /// All parameters as `[theta, weights, bias]`.
    pub fn parameters(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.n_parameters());
        p.extend_from_slice(&self.theta);
        p.extend_from_slice(&self.weights);
        p.extend_from_slice(&self.bias);
        p
    }

    pub fn set_parameters(&mut self, params: &[f64]) -> Result<(), TrainError> {
        if params.len() != self.n_parameters() {
            return Err(TrainError::Shape {
                what: "parameters",
                expected: self.n_parameters(),
                got: params.len(),
            });
        }
        let (t, rest) = params.split_at(self.theta.len());
        let (w, b) = rest.split_at(self.weights.len());
        self.theta.copy_from_slice(t);
        self.weights.copy_from_slice(w);
        self.bias.copy_from_slice(b);
        Ok(())
    }

    /// Binds features and the current angles into a literal circuit.
    pub fn bind(&self, features: &[f64]) -> Result<Circuit, TrainError> {
        let angles = self.encoding_angles(features)?;
        Ok(self.circuit.bind(&angles, &self.theta)?)
    }

    /// Encoding angles for a feature vector, after optional scaling.
    pub fn encoding_angles(&self, features: &[f64]) -> Result<Vec<f64>, TrainError> {
        if features.len() != self.config.n_qubits {
            return Err(TrainError::Shape {
                what: "features",
                expected: self.config.n_qubits,
                got: features.len(),
            });
        }
        Ok(self.encoding.apply_scaling(features)?)
    }

    /// `2^n` measurement distribution of the quantum layer.
    pub fn quantum_distribution(&self, features: &[f64]) -> Result<Vec<f64>, TrainError> {
        self.backend().distribution(&self.bind(features)?)
    }

    /// Head logits `W·p + b`.
    pub fn logits(&self, p: &[f64]) -> Vec<f64> {
        self.weights
            .chunks_exact(p.len())
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(p).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect()
    }

    /// Class probabilities for one feature vector.
    pub fn forward(&self, features: &[f64]) -> Result<Vec<f64>, TrainError> {
        let p = self.quantum_distribution(features)?;
        Ok(softmax(&self.logits(&p)))
    }
}

pub fn softmax(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exp.iter().sum();
    exp.into_iter().map(|v| v / total).collect()
}

/// Index of the largest entry; the first one wins ties.
pub fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &x)| {
            if x > bv {
                (i, x)
            } else {
                (bi, bv)
            }
        })
        .0
}
