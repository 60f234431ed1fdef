use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::model::{softmax, Backend, Model};
use super::{Example, TrainError};
use crate::circuit::{Circuit, SlotRole};
use crate::statevector::GateKind;

/// Probabilities below this are floored before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

/// Mean cross-entropy `−log p[label]` over a batch of predictions.
pub fn cross_entropy(predictions: &[Vec<f64>], labels: &[usize]) -> Result<f64, TrainError> {
    if predictions.len() != labels.len() {
        return Err(TrainError::Shape {
            what: "labels",
            expected: predictions.len(),
            got: labels.len(),
        });
    }
    if predictions.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut total = 0.0;
    for (p, &y) in predictions.iter().zip(labels) {
        let py = *p.get(y).ok_or(TrainError::LabelOutOfRange {
            label: y,
            n_classes: p.len(),
        })?;
        total -= py.max(PROB_FLOOR).ln();
    }
    Ok(total / predictions.len() as f64)
}

/// Two-term parameter-shift gradient of a scalar `L(p)` with respect to the
/// trainable slots, given `∂L/∂p` at the unshifted point:
///
/// `∂L/∂θ_j = Σ_occ scale · Σ_k (∂L/∂p_k) · (p_k(α + π/2) − p_k(α − π/2)) / 2`
///
/// where each occurrence of `θ_j` enters a gate angle as `α = scale · θ_j`.
/// Only RY and RZ occurrences are allowed.
pub fn parameter_shift_gradient(
    circuit: &Circuit,
    encoding: &[f64],
    theta: &[f64],
    backend: &Backend,
    dl_dp: &[f64],
) -> Result<Vec<f64>, TrainError> {
    let occurrences = circuit.occurrences(SlotRole::Trainable);
    for occ in &occurrences {
        let kind = circuit.gates()[occ.gate].kind();
        if !matches!(kind, GateKind::Ry | GateKind::Rz) {
            return Err(TrainError::NonShiftable {
                gate: occ.gate,
                kind,
            });
        }
    }
    let bound = circuit.bind(encoding, theta)?;
    let mut grad = vec![0.0; theta.len()];
    for occ in occurrences {
        let plus = backend.distribution(&bound.shifted(occ.gate, FRAC_PI_2)?)?;
        let minus = backend.distribution(&bound.shifted(occ.gate, -FRAC_PI_2)?)?;
        if plus.len() != dl_dp.len() {
            return Err(TrainError::Shape {
                what: "dL/dp",
                expected: plus.len(),
                got: dl_dp.len(),
            });
        }
        let directional: f64 = dl_dp
            .iter()
            .zip(plus.iter().zip(&minus))
            .map(|(d, (a, b))| d * (a - b))
            .sum();
        grad[occ.role_index] += occ.scale * directional / 2.0;
    }
    Ok(grad)
}

/// Loss and gradients for a single example or averaged over a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub loss: f64,
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Gradients {
    /// Concatenated as `[theta, weights, bias]`, matching `Model::parameters`.
    pub fn flatten(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.theta.len() + self.weights.len() + self.bias.len());
        g.extend_from_slice(&self.theta);
        g.extend_from_slice(&self.weights);
        g.extend_from_slice(&self.bias);
        g
    }

    fn add_assign(&mut self, other: &Gradients) {
        self.loss += other.loss;
        for (a, b) in [
            (&mut self.theta, &other.theta),
            (&mut self.weights, &other.weights),
            (&mut self.bias, &other.bias),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }

    fn scale(&mut self, s: f64) {
        self.loss *= s;
        for v in [&mut self.theta, &mut self.weights, &mut self.bias] {
            v.iter_mut().for_each(|x| *x *= s);
        }
    }
}

/// Cross-entropy loss of one example and its gradient with respect to every
/// model parameter. The head gradient is analytic; the quantum part uses the
/// parameter-shift rule through the model's backend.
pub fn example_gradient(model: &Model, example: &Example) -> Result<Gradients, TrainError> {
    let n_classes = model.n_classes();
    if example.label >= n_classes {
        return Err(TrainError::LabelOutOfRange {
            label: example.label,
            n_classes,
        });
    }
    let backend = model.backend();
    let bound = model.bind(&example.features)?;
    let p = backend.distribution(&bound)?;
    let q = softmax(&model.logits(&p));
    let loss = -q[example.label].max(PROB_FLOOR).ln();

    let mut dz = q;
    dz[example.label] -= 1.0;
    let dim = p.len();
    let mut weights = vec![0.0; n_classes * dim];
    let mut dl_dp = vec![0.0; dim];
    for c in 0..n_classes {
        let row = &model.weights[c * dim..(c + 1) * dim];
        for k in 0..dim {
            weights[c * dim + k] = dz[c] * p[k];
            dl_dp[k] += row[k] * dz[c];
        }
    }
    let encoding = model.encoding_angles(&example.features)?;
    let theta =
        parameter_shift_gradient(model.circuit(), &encoding, &model.theta, &backend, &dl_dp)?;
    Ok(Gradients {
        loss,
        theta,
        weights,
        bias: dz,
    })
}

/// Batch-mean loss and gradients. Examples are evaluated in parallel and
/// reduced in input order, so the result does not depend on scheduling.
pub fn batch_gradient(model: &Model, batch: &[Example]) -> Result<Gradients, TrainError> {
    if batch.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let per_example = batch
        .par_iter()
        .map(|ex| example_gradient(model, ex))
        .collect::<Result<Vec<_>, _>>()?;
    let mut iter = per_example.into_iter();
    let mut total = iter.next().expect("batch is non-empty");
    for g in iter {
        total.add_assign(&g);
    }
    total.scale(1.0 / batch.len() as f64);
    Ok(total)
}

/// Batch-mean gradient of the loss with respect to the trainable angles.
pub fn quantum_gradient(model: &Model, batch: &[Example]) -> Result<Vec<f64>, TrainError> {
    Ok(batch_gradient(model, batch)?.theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Angle;
    use crate::statevector::Gate;

    #[test]
    fn loss_examples() {
        let ln2 = std::f64::consts::LN_2;
        assert!((cross_entropy(&[vec![0.5, 0.5]], &[1]).unwrap() - ln2).abs() < 1e-15);
        let l = cross_entropy(&[vec![1.0, 0.0]], &[0]).unwrap();
        assert!(l.abs() < 1e-11);
        let l = cross_entropy(&[vec![1.0, 0.0], vec![0.5, 0.5]], &[0, 0]).unwrap();
        assert!((l - ln2 / 2.0).abs() < 1e-15);
        let floor = cross_entropy(&[vec![1.0, 0.0]], &[1]).unwrap();
        assert!((floor + PROB_FLOOR.ln()).abs() < 1e-9);
        assert!(matches!(
            cross_entropy(&[vec![0.5, 0.5]], &[2]),
            Err(TrainError::LabelOutOfRange { label: 2, .. })
        ));
    }

    fn single_ry() -> Circuit {
        let mut c = Circuit::new(1).unwrap();
        let s = c.add_slot(SlotRole::Trainable);
        c.push(Gate::Ry {
            target: 0,
            theta: Angle::slot(s),
        })
        .unwrap();
        c
    }

    #[test]
    fn expectation_z_gradient() {
        // ⟨Z⟩ = p0 − p1 = cos θ, so ∂L/∂p = (1, −1) and the gradient is −sin θ.
        let c = single_ry();
        let g = parameter_shift_gradient(&c, &[], &[0.0], &Backend::Exact, &[1.0, -1.0]).unwrap();
        assert!(g[0].abs() < 1e-12);
        let g =
            parameter_shift_gradient(&c, &[], &[FRAC_PI_2], &Backend::Exact, &[1.0, -1.0]).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-12);
        for t in [-2.0, 0.4, 1.3] {
            let g = parameter_shift_gradient(&c, &[], &[t], &Backend::Exact, &[1.0, -1.0]).unwrap();
            assert!((g[0] + t.sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn controlled_rotation_not_shiftable() {
        let mut c = Circuit::new(2).unwrap();
        let s = c.add_slot(SlotRole::Trainable);
        c.push(Gate::Cry {
            control: 0,
            target: 1,
            theta: Angle::slot(s),
        })
        .unwrap();
        let err = parameter_shift_gradient(&c, &[], &[0.1], &Backend::Exact, &[0.0; 4]);
        assert!(matches!(
            err,
            Err(TrainError::NonShiftable {
                kind: GateKind::Cry,
                ..
            })
        ));
        let d = c.decompose_controlled_rotations();
        assert!(parameter_shift_gradient(&d, &[], &[0.1], &Backend::Exact, &[0.0; 4]).is_ok());
    }
}
