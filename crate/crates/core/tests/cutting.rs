mod common;

use common::*;
use dqcnn_core::circuit::{
    build_encoding_layer, build_mps_ansatz, Angle, EncodingSpec, KernelSpec, SlotRole,
};
use dqcnn_core::cutting::{split, Execution, FragmentPair, CUT_TERMS};
use dqcnn_core::{Circuit, CutSpec, Gate, ReconstructionPlan};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn plan(circuit: &Circuit, wire: usize, position: usize) -> ReconstructionPlan {
    ReconstructionPlan::new(split(circuit, CutSpec { wire, position }).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cut_reconstruction_is_exact((circuit, wire, position) in cuttable_circuit(8)) {
        let exact = circuit.simulate().unwrap().probabilities();
        let rebuilt = plan(&circuit, wire, position).reconstruct_probabilities().unwrap();
        prop_assert!(max_abs_diff(&exact, &rebuilt) < 1e-9);
    }

    #[test]
    fn cut_expectations_are_exact(
        (circuit, wire, position, obs) in cuttable_circuit(6)
            .prop_flat_map(|(c, w, p)| {
                let n = c.n_qubits();
                (Just(c), Just(w), Just(p), pauli_strategy(n))
            })
    ) {
        let exact = circuit.simulate().unwrap().expectation(&obs).unwrap();
        let rebuilt = plan(&circuit, wire, position).reconstruct_expectation(&obs).unwrap();
        prop_assert!((exact - rebuilt).abs() < 1e-9);
    }

    #[test]
    fn parallel_and_sequential_agree_bitwise((circuit, wire, position) in cuttable_circuit(6)) {
        let p = plan(&circuit, wire, position);
        let a = p.combine(&p.execute(Execution::Sequential).unwrap());
        let b = p.combine(&p.execute(Execution::Parallel).unwrap());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn fragment_documents_round_trip((circuit, wire, position) in cuttable_circuit(6)) {
        let pair = split(&circuit, CutSpec { wire, position }).unwrap();
        let (up, down) = pair.to_documents();
        let up = dqcnn_core::circuit::CircuitDocument::from_json(&up.to_json().unwrap()).unwrap();
        let down = dqcnn_core::circuit::CircuitDocument::from_json(&down.to_json().unwrap()).unwrap();
        prop_assert_eq!(FragmentPair::from_documents(&up, &down).unwrap(), pair);
    }
}

type M2 = [[Complex64; 2]; 2];

fn outer(v: [Complex64; 2]) -> M2 {
    let mut m = [[Complex64::default(); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = v[i] * v[j].conj();
        }
    }
    m
}

fn trace_product(a: &M2, b: &M2) -> Complex64 {
    (0..2)
        .flat_map(|i| (0..2).map(move |k| a[i][k] * b[k][i]))
        .sum()
}

#[test]
fn term_table_resolves_random_densities() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        // Random point in the Bloch ball.
        let r: [f64; 3] = loop {
            let v = [0; 3].map(|_| rng.gen_range(-1.0..1.0));
            if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                break v;
            }
        };
        let i = Complex64::i();
        let rho: M2 = [
            [c(0.5 * (1.0 + r[2])), 0.5 * (r[0] - i * r[1])],
            [0.5 * (r[0] + i * r[1]), c(0.5 * (1.0 - r[2]))],
        ];
        let mut sum = [[Complex64::default(); 2]; 2];
        for t in CUT_TERMS {
            let weight = t.coefficient * trace_product(&t.observable.matrix(), &rho);
            let proj = outer(t.eigenstate.amplitudes());
            for a in 0..2 {
                for b in 0..2 {
                    sum[a][b] += weight * proj[a][b];
                }
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                assert!((sum[a][b] - rho[a][b]).norm() < 1e-12);
            }
        }
    }
}

fn ansatz_circuit(n: usize) -> Circuit {
    let enc = build_encoding_layer(&EncodingSpec::new(n)).unwrap();
    let ansatz = build_mps_ansatz(n, &KernelSpec::default(), 1).unwrap();
    enc.compose(&ansatz)
        .unwrap()
        .decompose_controlled_rotations()
}

#[test]
fn eight_qubit_ansatz_cut_matches_over_random_parameters() {
    let symbolic = ansatz_circuit(8);
    let cut = CutSpec::after_last_upstream_gate(&symbolic, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n_theta = symbolic.slot_count(SlotRole::Trainable);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let x: Vec<f64> = (0..8)
            .map(|_| rng.gen_range(0.0..std::f64::consts::PI))
            .collect();
        let t: Vec<f64> = (0..n_theta).map(|_| rng.gen_range(-3.2..3.2)).collect();
        let bound = symbolic.bind(&x, &t).unwrap();
        let exact = bound.simulate().unwrap().probabilities();
        let rebuilt = ReconstructionPlan::new(split(&bound, cut).unwrap())
            .reconstruct_probabilities()
            .unwrap();
        worst = worst.max(max_abs_diff(&exact, &rebuilt));
    }
    assert!(worst < 1e-9, "worst deviation {worst:e}");
}

#[test]
fn corrupted_term_table_is_detected() {
    let circuit = to_circuit(
        3,
        &[
            Gate::Ry {
                target: 0,
                theta: 0.7,
            },
            Gate::Cnot {
                control: 0,
                target: 1,
            },
            Gate::Ry {
                target: 1,
                theta: 0.4,
            },
            Gate::Rz {
                target: 1,
                phi: 0.9,
            },
            Gate::H { target: 2 },
            Gate::Rz {
                target: 1,
                phi: 0.6,
            },
            Gate::H { target: 1 },
            Gate::Ry {
                target: 1,
                theta: 0.5,
            },
            Gate::Cnot {
                control: 1,
                target: 2,
            },
        ],
    );
    let pair = split(
        &circuit,
        CutSpec {
            wire: 1,
            position: 4,
        },
    )
    .unwrap();
    let exact = circuit.simulate().unwrap().probabilities();
    let good = ReconstructionPlan::new(pair.clone())
        .reconstruct_probabilities()
        .unwrap();
    assert!(max_abs_diff(&exact, &good) < 1e-12);
    for k in 0..8 {
        let mut terms = CUT_TERMS;
        terms[k].coefficient = -terms[k].coefficient;
        let bad = ReconstructionPlan::with_terms(pair.clone(), terms)
            .reconstruct_probabilities()
            .unwrap();
        assert!(max_abs_diff(&exact, &bad) > 1e-3, "term {}", k + 1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn circuit_documents_round_trip(
        n in 1usize..6,
        raw in prop::collection::vec((0usize..5, 0usize..6, 0usize..6, -10.0f64..10.0, 0usize..3), 0..40),
    ) {
        let mut c = Circuit::new(n).unwrap();
        let enc = c.add_slot(SlotRole::Encoding);
        let tr = c.add_slot(SlotRole::Trainable);
        for (kind, a, b, x, mode) in raw {
            let (a, b) = (a % n, b % n);
            let angle = match mode {
                0 => Angle::Literal(x),
                1 => Angle::Param { slot: enc, scale: 1.0 },
                _ => Angle::Param { slot: tr, scale: x },
            };
            let g = match kind {
                0 => Gate::H { target: a },
                1 => Gate::Ry { target: a, theta: angle },
                2 => Gate::Rz { target: a, phi: angle },
                3 if a != b => Gate::Cry { control: a, target: b, theta: angle },
                4 if a != b => Gate::Cnot { control: a, target: b },
                _ => continue,
            };
            c.push(g).unwrap();
        }
        let back = Circuit::deserialize(&c.serialize().unwrap()).unwrap();
        prop_assert_eq!(back, c);
    }
}
