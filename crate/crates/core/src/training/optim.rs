use serde::{Deserialize, Serialize};

use super::TrainError;

fn default_lr() -> f64 {
    0.05
}
fn default_rho() -> f64 {
    0.9
}
fn default_eps() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdadeltaConfig {
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

impl Default for AdadeltaConfig {
    fn default() -> Self {
        Self {
            lr: default_lr(),
            rho: default_rho(),
            eps: default_eps(),
        }
    }
}

/// Adadelta with a learning rate applied to the adaptive step:
///
/// ```text
/// v ← ρ v + (1 − ρ) g²
/// δ ← sqrt(u + ε) / sqrt(v + ε) · g
/// u ← ρ u + (1 − ρ) δ²
/// x ← x − lr · δ
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Adadelta {
    pub config: AdadeltaConfig,
    /// Running average of squared gradients (`v`).
    pub square_avg: Vec<f64>,
    /// Running average of squared updates (`u`).
    pub acc_delta: Vec<f64>,
}

impl Adadelta {
    pub fn new(config: AdadeltaConfig, n_params: usize) -> Self {
        Self {
            config,
            square_avg: vec![0.0; n_params],
            acc_delta: vec![0.0; n_params],
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<(), TrainError> {
        for (what, got) in [("parameters", params.len()), ("gradients", grads.len())] {
            if got != self.square_avg.len() {
                return Err(TrainError::Shape {
                    what,
                    expected: self.square_avg.len(),
                    got,
                });
            }
        }
        let AdadeltaConfig { lr, rho, eps } = self.config;
        for i in 0..params.len() {
            let g = grads[i];
            let v = rho * self.square_avg[i] + (1.0 - rho) * g * g;
            let delta = (self.acc_delta[i] + eps).sqrt() / (v + eps).sqrt() * g;
            self.square_avg[i] = v;
            self.acc_delta[i] = rho * self.acc_delta[i] + (1.0 - rho) * delta * delta;
            params[i] -= lr * delta;
        }
        Ok(())
    }
}
