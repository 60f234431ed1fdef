//! Run configuration, read from TOML.

use std::fs;
use std::path::{Path, PathBuf};

use dqcnn_core::training::{ModelConfig, TrainConfig};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, CliResult};

fn default_samples() -> usize {
    200
}
fn default_classes() -> usize {
    2
}
fn default_ratios() -> Vec<f64> {
    vec![0.8, 0.2]
}

/// Seeded separable angle clusters with one feature per qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticData {
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default = "default_classes")]
    pub n_classes: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_ratios")]
    pub split_ratios: Vec<f64>,
}

impl Default for SyntheticData {
    fn default() -> Self {
        Self {
            n_samples: default_samples(),
            n_classes: default_classes(),
            seed: 0,
            split_ratios: default_ratios(),
        }
    }
}

/// Exactly one of `manifest` and `synthetic`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub manifest: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticData>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum VerifyCircuit {
    /// Encoding layer plus MPS ansatz with random angles and inputs.
    #[default]
    Mps,
    /// `H` then `CNOT`, cut between them.
    Bell,
}

fn default_trials() -> usize {
    100
}
fn default_verify_qubits() -> usize {
    8
}
fn default_tolerance() -> f64 {
    1e-8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_verify_qubits")]
    pub n_qubits: usize,
    #[serde(default)]
    pub circuit: VerifyCircuit,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub seed: u64,
    /// Negates the coefficient of this 1-based term. Negative control only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrupt_term: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            n_qubits: default_verify_qubits(),
            circuit: VerifyCircuit::Mps,
            tolerance: default_tolerance(),
            seed: 0,
            corrupt_term: None,
        }
    }
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub data: DataConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: default_output(),
            data: DataConfig::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub epochs: Option<usize>,
    pub cut: Option<bool>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config: {e}")))
    }

    /// Reads a config file and resolves relative paths against its
    /// directory.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.output_dir);
        if let Some(m) = self.data.manifest.as_mut() {
            fix(m);
        }
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(seed) = o.seed {
            self.train.seed = seed;
            self.verify.seed = seed;
        }
        if let Some(epochs) = o.epochs {
            self.train.epochs = epochs;
        }
        if let Some(cut) = o.cut {
            self.model.cut = cut;
        }
        if let Some(out) = &o.output_dir {
            self.output_dir = out.clone();
        }
    }

    /// Checks that the data source is well-formed and referenced files exist.
    pub fn validate_data(&self) -> CliResult<()> {
        match (&self.data.manifest, &self.data.synthetic) {
            (Some(m), None) => {
                if !m.is_file() {
                    return Err(invalid(format!("manifest {} does not exist", m.display())));
                }
                Ok(())
            }
            (None, Some(s)) => {
                if s.n_samples == 0 || s.n_classes < 2 {
                    return Err(invalid(
                        "synthetic data needs samples and at least two classes",
                    ));
                }
                if s.n_classes != self.model.n_classes {
                    return Err(invalid(format!(
                        "synthetic data has {} classes, model has {}",
                        s.n_classes, self.model.n_classes
                    )));
                }
                Ok(())
            }
            (Some(_), Some(_)) => Err(invalid("data: give either manifest or synthetic, not both")),
            (None, None) => Err(invalid("data: a manifest or synthetic section is required")),
        }
    }

    pub fn validate_verify(&self) -> CliResult<()> {
        let v = &self.verify;
        if v.trials == 0 {
            return Err(invalid("verify.trials must be positive"));
        }
        if v.circuit == VerifyCircuit::Mps && !(2..=12).contains(&v.n_qubits) {
            return Err(invalid("verify.n_qubits must be between 2 and 12"));
        }
        if v.tolerance.is_nan() || v.tolerance <= 0.0 {
            return Err(invalid("verify.tolerance must be positive"));
        }
        if let Some(k) = v.corrupt_term {
            if !(1..=8).contains(&k) {
                return Err(invalid("verify.corrupt_term must be in 1..=8"));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run config serializes")
    }

    /// SHA-256 of the resolved config, hex encoded.
    pub fn digest(&self) -> String {
        let hash = Sha256::digest(self.to_toml().as_bytes());
        hash.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("m.toml"), "").unwrap();
        let path = dir.path().join("run.toml");
        fs::write(
            &path,
            "output_dir = \"runs/a\"\n[data]\nmanifest = \"m.toml\"\n",
        )
        .unwrap();
        let cfg = RunConfig::load(&path).unwrap();
        assert_eq!(cfg.output_dir, dir.path().join("runs/a"));
        assert_eq!(
            cfg.data.manifest.as_deref(),
            Some(dir.path().join("m.toml").as_path())
        );
        assert_eq!(cfg.train.batch_size, 16);
        assert_eq!(cfg.train.optimizer.lr, 0.05);
        assert_eq!(cfg.verify.trials, 100);
        cfg.validate_data().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_toml("[model]\nqubits = 3\n").is_err());
        let mut cfg = RunConfig::default();
        assert!(cfg.validate_data().is_err());
        cfg.data.manifest = Some("/definitely/missing.toml".into());
        assert!(cfg.validate_data().is_err());
        cfg.verify.corrupt_term = Some(9);
        assert!(cfg.validate_verify().is_err());
    }

    #[test]
    fn overrides_and_digest() {
        let mut cfg = RunConfig::default();
        let before = cfg.digest();
        cfg.apply(&Overrides {
            seed: Some(4),
            epochs: Some(2),
            cut: Some(true),
            output_dir: None,
        });
        assert_eq!(
            (cfg.train.seed, cfg.train.epochs, cfg.model.cut),
            (4, 2, true)
        );
        assert_ne!(cfg.digest(), before);
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }
}
