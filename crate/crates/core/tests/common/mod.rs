//! Dense-matrix reference simulator and random circuit generators.
#![allow(dead_code)]

use dqcnn_core::circuit::Angle;
use dqcnn_core::{Circuit, Gate, Pauli, PauliString};
use num_complex::Complex64;
use proptest::prelude::*;

pub type Matrix = Vec<Vec<Complex64>>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(dim: usize) -> Matrix {
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| c(if i == j { 1.0 } else { 0.0 }))
                .collect()
        })
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn dagger(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| a[j][i].conj()).collect())
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    (0..n * m)
        .map(|i| {
            (0..n * m)
                .map(|j| a[i / m][j / m] * b[i % m][j % m])
                .collect()
        })
        .collect()
}

fn bit(n: usize, q: usize, idx: usize) -> usize {
    (idx >> (n - 1 - q)) & 1
}

/// Full `2^n × 2^n` operator of one gate, built entry by entry from its
/// local matrix. The first listed qubit is the high bit of the local index.
pub fn embed(n: usize, gate: &Gate<f64>) -> Matrix {
    let local = gate.matrix();
    let qubits = gate.qubits();
    let dim = 1 << n;
    let loc = |idx: usize| qubits.iter().fold(0, |acc, &q| (acc << 1) | bit(n, q, idx));
    let mask: usize = qubits.iter().map(|&q| 1 << (n - 1 - q)).sum();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    if i & !mask == j & !mask {
                        local[loc(i)][loc(j)]
                    } else {
                        c(0.0)
                    }
                })
                .collect()
        })
        .collect()
}

pub fn dense_state(n: usize, gates: &[Gate<f64>]) -> Vec<Complex64> {
    let mut psi = vec![c(0.0); 1 << n];
    psi[0] = c(1.0);
    for g in gates {
        let u = embed(n, g);
        psi = u
            .iter()
            .map(|row| row.iter().zip(&psi).map(|(a, b)| a * b).sum())
            .collect();
    }
    psi
}

pub fn pauli_matrix(p: &PauliString) -> Matrix {
    p.factors().iter().fold(identity(1), |acc, f| {
        let m = f.matrix();
        kron(&acc, &m.iter().map(|r| r.to_vec()).collect())
    })
}

pub fn dense_expectation(psi: &[Complex64], p: &PauliString) -> f64 {
    let m = pauli_matrix(p);
    let mut acc = c(0.0);
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            acc += psi[i].conj() * m[i][j] * psi[j];
        }
    }
    acc.re
}

pub fn pauli_strategy(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(prop::sample::select(Pauli::ALL.to_vec()), n).prop_map(PauliString::new)
}

/// A random gate on qubits drawn from `pool` (at least two entries for
/// two-qubit gates to be possible).
pub fn gate_on(pool: Vec<usize>) -> BoxedStrategy<Gate<f64>> {
    let angle = -2.0 * std::f64::consts::PI..2.0 * std::f64::consts::PI;
    let single = {
        let pool = pool.clone();
        (0..3usize, prop::sample::select(pool), angle.clone()).prop_map(|(k, t, a)| match k {
            0 => Gate::H { target: t },
            1 => Gate::Ry {
                target: t,
                theta: a,
            },
            _ => Gate::Rz { target: t, phi: a },
        })
    };
    if pool.len() < 2 {
        return single.boxed();
    }
    let pair = (
        prop::sample::subsequence(pool, 2),
        any::<bool>(),
        any::<bool>(),
        angle,
    )
        .prop_map(|(q, flip, cry, a)| {
            let (control, target) = if flip { (q[1], q[0]) } else { (q[0], q[1]) };
            if cry {
                Gate::Cry {
                    control,
                    target,
                    theta: a,
                }
            } else {
                Gate::Cnot { control, target }
            }
        });
    prop_oneof![single, pair].boxed()
}

pub fn random_gates(n: usize, len: std::ops::Range<usize>) -> BoxedStrategy<Vec<Gate<f64>>> {
    prop::collection::vec(gate_on((0..n).collect()), len).boxed()
}

pub fn to_circuit(n: usize, gates: &[Gate<f64>]) -> Circuit {
    Circuit::from_parts(
        n,
        gates.iter().map(|g| g.map_angle(Angle::Literal)).collect(),
        vec![],
    )
    .unwrap()
}

/// A circuit that admits a cut on `wire` at the returned position: a prefix
/// of gates on `0..=wire` or strictly above it, then a suffix on
/// `wire..n` or strictly below it.
pub fn cuttable_circuit(max_qubits: usize) -> impl Strategy<Value = (Circuit, usize, usize)> {
    (2..=max_qubits)
        .prop_flat_map(|n| (Just(n), 0..n - 1))
        .prop_flat_map(|(n, wire)| {
            let low_incl: Vec<usize> = (0..=wire).collect();
            let above: Vec<usize> = (wire + 1..n).collect();
            let high_incl: Vec<usize> = (wire..n).collect();
            let below: Vec<usize> = (0..wire).collect();
            let prefix_side = |pool: Vec<usize>| prop::collection::vec(gate_on(pool), 0..12);
            let prefix = (prefix_side(low_incl), prefix_side(above.clone()));
            let suffix = (
                prefix_side(high_incl),
                if below.is_empty() {
                    Just(Vec::new()).boxed()
                } else {
                    prefix_side(below).boxed()
                },
            );
            (Just(n), Just(wire), prefix, suffix, any::<u64>())
        })
        .prop_map(|(n, wire, (p1, p2), (s1, s2), shuffle)| {
            // Interleave each pair deterministically from the seed.
            let mix = |a: Vec<Gate<f64>>, b: Vec<Gate<f64>>, seed: u64| {
                let mut out = Vec::new();
                let (mut ia, mut ib) = (a.into_iter(), b.into_iter());
                let mut s = seed;
                loop {
                    s = s
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    let take_a = s >> 63 == 0;
                    match (take_a, ia.len(), ib.len()) {
                        (_, 0, 0) => break,
                        (true, 1.., _) | (_, 1.., 0) => out.push(ia.next().unwrap()),
                        _ => out.push(ib.next().unwrap()),
                    }
                }
                out
            };
            let mut gates = mix(p1, p2, shuffle);
            let position = gates.len();
            gates.extend(mix(s1, s2, shuffle.rotate_left(17)));
            (to_circuit(n, &gates), wire, position)
        })
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
