use num_complex::Complex64;
use rayon::prelude::*;

use super::split::{Fragment, FragmentPair};
use super::terms::{CutTerm, CUT_TERMS};
use super::CutError;
use crate::circuit::FragmentRole;
use crate::statevector::{Eigenstate, Pauli, PauliString, StateVector};

/// What to measure on the upstream fragment's non-cut qubits.
#[derive(Debug, Clone, PartialEq)]
pub enum UpstreamRequest {
    /// Pauli string on qubits `0..wire`.
    Observable(PauliString),
    /// Projector onto basis state `index` of qubits `0..wire`.
    Projector(usize),
}

/// What to read out of the downstream fragment.
#[derive(Debug, Clone, PartialEq)]
pub enum DownstreamRequest {
    Observable(PauliString),
    Distribution,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DownstreamOutput {
    Expectation(f64),
    Distribution(Vec<f64>),
}

/// Whether independent fragment executions are fanned out to the rayon pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

fn expect_role(fragment: &Fragment, role: FragmentRole) -> Result<(), CutError> {
    if fragment.role == role {
        Ok(())
    } else {
        Err(CutError::WrongRole {
            expected: role,
            got: fragment.role,
        })
    }
}

fn run_upstream(fragment: &Fragment) -> Result<StateVector, CutError> {
    expect_role(fragment, FragmentRole::Upstream)?;
    Ok(fragment.circuit.simulate()?)
}

fn run_downstream(fragment: &Fragment, prep: Eigenstate) -> Result<StateVector, CutError> {
    expect_role(fragment, FragmentRole::Downstream)?;
    let fresh = crate::statevector::prepare_eigenstate(prep);
    let mut state = StateVector::with_trailing_zeros(&fresh, fragment.n_qubits() - 1)?;
    state.run(&fragment.circuit.literal_gates()?)?;
    Ok(state)
}

/// `⟨Π_b ⊗ O⟩` for every `O ∈ {I, X, Y, Z}` on the cut wire, where `Π_b`
/// projects the remaining upstream qubits onto basis state `b`.
///
/// The cut wire is the least significant qubit of the upstream register, so
/// its two amplitudes for a fixed `b` sit at `2b` and `2b + 1`.
fn projected_cut_statistics(state: &StateVector, b: usize) -> [f64; 4] {
    let a = state.amplitudes();
    let (a0, a1) = (a[2 * b], a[2 * b + 1]);
    let cross: Complex64 = a0.conj() * a1;
    let (p0, p1) = (a0.norm_sqr(), a1.norm_sqr());
    [p0 + p1, 2.0 * cross.re, 2.0 * cross.im, p0 - p1]
}

fn pauli_slot(p: Pauli) -> usize {
    match p {
        Pauli::I => 0,
        Pauli::X => 1,
        Pauli::Y => 2,
        Pauli::Z => 3,
    }
}

/// Joint expectation `⟨P_up ⊗ O_m⟩` on the upstream fragment's output.
pub fn execute_upstream(
    fragment: &Fragment,
    term: &CutTerm,
    request: &UpstreamRequest,
) -> Result<f64, CutError> {
    let state = run_upstream(fragment)?;
    let others = fragment.n_qubits() - 1;
    match request {
        UpstreamRequest::Observable(p) => {
            if p.n_qubits() != others {
                return Err(CutError::RequestSize {
                    expected: others,
                    got: p.n_qubits(),
                });
            }
            Ok(state.expectation(&p.with_factor(term.observable))?)
        }
        &UpstreamRequest::Projector(b) => {
            if b >= 1 << others {
                return Err(CutError::RequestSize {
                    expected: 1 << others,
                    got: b,
                });
            }
            Ok(projected_cut_statistics(&state, b)[pauli_slot(term.observable)])
        }
    }
}

/// Runs the downstream fragment with its fresh wire prepared in the term's
/// eigenstate and every other qubit in `|0⟩`.
pub fn execute_downstream(
    fragment: &Fragment,
    term: &CutTerm,
    request: &DownstreamRequest,
) -> Result<DownstreamOutput, CutError> {
    if let DownstreamRequest::Observable(p) = request {
        if p.n_qubits() != fragment.n_qubits() {
            return Err(CutError::RequestSize {
                expected: fragment.n_qubits(),
                got: p.n_qubits(),
            });
        }
    }
    let state = run_downstream(fragment, term.eigenstate)?;
    Ok(match request {
        DownstreamRequest::Observable(p) => DownstreamOutput::Expectation(state.expectation(p)?),
        DownstreamRequest::Distribution => DownstreamOutput::Distribution(state.probabilities()),
    })
}

/// Raw fragment outputs for a distribution reconstruction.
///
/// One upstream simulation yields the statistics for all four Paulis on the
/// cut wire; six downstream simulations cover the distinct preparations.
#[derive(Debug, Clone, PartialEq)]
pub struct FragmentResults {
    /// `upstream[b][k]` is `⟨Π_b ⊗ P_k⟩` with `P = (I, X, Y, Z)`.
    pub upstream: Vec<[f64; 4]>,
    /// Downstream distribution per eigenstate, indexed by `Eigenstate::index`.
    pub downstream: Vec<Vec<f64>>,
}

/// The fragment pair together with the term table used to recombine it.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionPlan {
    pub fragments: FragmentPair,
    pub terms: [CutTerm; 8],
}

impl ReconstructionPlan {
    pub fn new(fragments: FragmentPair) -> Self {
        Self::with_terms(fragments, CUT_TERMS)
    }

    /// Plan with a custom term table. Anything but the standard table gives
    /// wrong results; this exists for negative-control checks.
    pub fn with_terms(fragments: FragmentPair, terms: [CutTerm; 8]) -> Self {
        Self { fragments, terms }
    }

    pub fn execute(&self, mode: Execution) -> Result<FragmentResults, CutError> {
        let up = &self.fragments.upstream;
        let down = &self.fragments.downstream;
        let upstream = || -> Result<Vec<[f64; 4]>, CutError> {
            let state = run_upstream(up)?;
            Ok((0..1usize << (up.n_qubits() - 1))
                .map(|b| projected_cut_statistics(&state, b))
                .collect())
        };
        let prep = |e: &Eigenstate| run_downstream(down, *e).map(|s| s.probabilities());
        let (upstream, downstream) = match mode {
            Execution::Sequential => (
                upstream()?,
                Eigenstate::ALL
                    .iter()
                    .map(prep)
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            Execution::Parallel => {
                let (u, d) = rayon::join(upstream, || {
                    Eigenstate::ALL
                        .par_iter()
                        .map(prep)
                        .collect::<Result<Vec<_>, _>>()
                });
                (u?, d?)
            }
        };
        Ok(FragmentResults {
            upstream,
            downstream,
        })
    }

    /// Recombines fragment outputs into the full `2^n` distribution.
    ///
    /// Entry `(b_up, b_down)` lives at `b_up · 2^(n − wire) + b_down`, which
    /// is the uncut circuit's basis index under MSB-first ordering. Terms are
    /// summed in table order regardless of how the fragments were executed.
    pub fn combine(&self, results: &FragmentResults) -> Vec<f64> {
        let down_dim = results.downstream.first().map_or(0, Vec::len);
        let mut out = Vec::with_capacity(results.upstream.len() * down_dim);
        for up in &results.upstream {
            for b_down in 0..down_dim {
                let mut acc = 0.0;
                for t in &self.terms {
                    acc += t.coefficient
                        * up[pauli_slot(t.observable)]
                        * results.downstream[t.eigenstate.index()][b_down];
                }
                out.push(acc);
            }
        }
        out
    }

    /// Reconstructed output distribution of the uncut circuit. Entries may be
    /// slightly negative from rounding; see [`clamp_distribution`].
    pub fn reconstruct_probabilities(&self) -> Result<Vec<f64>, CutError> {
        Ok(self.combine(&self.execute(Execution::Sequential)?))
    }

    /// `⟨P_up ⊗ P_down⟩` of the uncut circuit, where the observable's factor
    /// on the cut wire belongs to `P_down`.
    pub fn reconstruct_expectation(&self, observable: &PauliString) -> Result<f64, CutError> {
        let n = self.fragments.source_n_qubits();
        if observable.n_qubits() != n {
            return Err(CutError::RequestSize {
                expected: n,
                got: observable.n_qubits(),
            });
        }
        let wire = self.fragments.cut().wire;
        let p_up = PauliString::new(observable.factors()[..wire].to_vec());
        let p_down = PauliString::new(observable.factors()[wire..].to_vec());

        let up_state = run_upstream(&self.fragments.upstream)?;
        let mut up_values = [0.0; 4];
        for pauli in Pauli::ALL {
            up_values[pauli_slot(pauli)] = up_state.expectation(&p_up.with_factor(pauli))?;
        }
        let mut down_values = [0.0; 6];
        for e in Eigenstate::ALL {
            down_values[e.index()] =
                run_downstream(&self.fragments.downstream, e)?.expectation(&p_down)?;
        }
        Ok(self
            .terms
            .iter()
            .map(|t| {
                t.coefficient
                    * up_values[pauli_slot(t.observable)]
                    * down_values[t.eigenstate.index()]
            })
            .sum())
    }

    /// Per-term contributions `c_m · up_m · down_m` to an expectation, in
    /// table order.
    pub fn term_contributions(&self, observable: &PauliString) -> Result<Vec<f64>, CutError> {
        let wire = self.fragments.cut().wire;
        let up_req =
            UpstreamRequest::Observable(PauliString::new(observable.factors()[..wire].to_vec()));
        let down_req =
            DownstreamRequest::Observable(PauliString::new(observable.factors()[wire..].to_vec()));
        self.terms
            .iter()
            .map(|t| {
                let up = execute_upstream(&self.fragments.upstream, t, &up_req)?;
                let down = match execute_downstream(&self.fragments.downstream, t, &down_req)? {
                    DownstreamOutput::Expectation(v) => v,
                    DownstreamOutput::Distribution(_) => unreachable!("observable request"),
                };
                Ok(t.coefficient * up * down)
            })
            .collect()
    }
}

/// Clamps negative entries to zero and renormalizes to unit sum.
pub fn clamp_distribution(mut p: Vec<f64>) -> Vec<f64> {
    for v in p.iter_mut() {
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    let total: f64 = p.iter().sum();
    if total > 0.0 {
        for v in p.iter_mut() {
            *v /= total;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Circuit;
    use crate::cutting::{split, CutSpec};
    use crate::statevector::Gate;

    fn bell_plan() -> ReconstructionPlan {
        let c = Circuit::from_parts(
            2,
            vec![
                Gate::H { target: 0 },
                Gate::Cnot {
                    control: 0,
                    target: 1,
                },
            ],
            vec![],
        )
        .unwrap();
        ReconstructionPlan::new(
            split(
                &c,
                CutSpec {
                    wire: 0,
                    position: 1,
                },
            )
            .unwrap(),
        )
    }

    fn term_with(o: Pauli, e: Eigenstate) -> CutTerm {
        *CUT_TERMS
            .iter()
            .find(|t| t.observable == o && t.eigenstate == e)
            .unwrap()
    }

    #[test]
    fn upstream_examples() {
        let h = Circuit::from_parts(1, vec![Gate::H { target: 0 }], vec![]).unwrap();
        let plan = ReconstructionPlan::new(
            split(
                &h,
                CutSpec {
                    wire: 0,
                    position: 1,
                },
            )
            .unwrap(),
        );
        let none = UpstreamRequest::Observable(PauliString::identity(0));
        let x = term_with(Pauli::X, Eigenstate::Plus);
        let v = execute_upstream(&plan.fragments.upstream, &x, &none).unwrap();
        assert!((v - 1.0).abs() < 1e-12);

        let id = Circuit::new(1).unwrap();
        let plan = ReconstructionPlan::new(
            split(
                &id,
                CutSpec {
                    wire: 0,
                    position: 0,
                },
            )
            .unwrap(),
        );
        let z = term_with(Pauli::Z, Eigenstate::Zero);
        assert!(
            (execute_upstream(&plan.fragments.upstream, &z, &none).unwrap() - 1.0).abs() < 1e-12
        );
        assert!(
            execute_upstream(&plan.fragments.upstream, &x, &none)
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(
            (execute_upstream(&plan.fragments.upstream, &z, &UpstreamRequest::Projector(0))
                .unwrap()
                - 1.0)
                .abs()
                < 1e-12
        );
        assert!(matches!(
            execute_upstream(
                &plan.fragments.upstream,
                &z,
                &UpstreamRequest::Observable(PauliString::identity(1))
            ),
            Err(CutError::RequestSize { .. })
        ));
    }

    #[test]
    fn downstream_examples() {
        let plan = bell_plan();
        let zz = DownstreamRequest::Observable("ZZ".parse().unwrap());
        for e in [Eigenstate::Zero, Eigenstate::One] {
            let t = term_with(Pauli::Z, e);
            assert_eq!(
                execute_downstream(&plan.fragments.downstream, &t, &zz).unwrap(),
                DownstreamOutput::Expectation(1.0)
            );
        }
        let id = Circuit::new(1).unwrap();
        let p = ReconstructionPlan::new(
            split(
                &id,
                CutSpec {
                    wire: 0,
                    position: 0,
                },
            )
            .unwrap(),
        );
        let t = term_with(Pauli::X, Eigenstate::Plus);
        match execute_downstream(
            &p.fragments.downstream,
            &t,
            &DownstreamRequest::Observable("Z".parse().unwrap()),
        )
        .unwrap()
        {
            DownstreamOutput::Expectation(v) => assert!(v.abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            execute_downstream(&p.fragments.downstream, &t, &zz),
            Err(CutError::RequestSize { .. })
        ));
    }

    #[test]
    fn wrong_role_rejected() {
        let plan = bell_plan();
        let t = CUT_TERMS[0];
        assert!(matches!(
            execute_upstream(
                &plan.fragments.downstream,
                &t,
                &UpstreamRequest::Projector(0)
            ),
            Err(CutError::WrongRole { .. })
        ));
        assert!(matches!(
            execute_downstream(
                &plan.fragments.upstream,
                &t,
                &DownstreamRequest::Distribution
            ),
            Err(CutError::WrongRole { .. })
        ));
    }

    #[test]
    fn trivial_cut_contributions() {
        let id = Circuit::new(1).unwrap();
        let plan = ReconstructionPlan::new(
            split(
                &id,
                CutSpec {
                    wire: 0,
                    position: 0,
                },
            )
            .unwrap(),
        );
        let z: PauliString = "Z".parse().unwrap();
        let contrib = plan.term_contributions(&z).unwrap();
        let expected = [0.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5];
        for (c, e) in contrib.iter().zip(expected) {
            assert!((c - e).abs() < 1e-12, "{contrib:?}");
        }
        assert!((plan.reconstruct_expectation(&z).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let plan = bell_plan();
        let a = plan.combine(&plan.execute(Execution::Sequential).unwrap());
        let b = plan.combine(&plan.execute(Execution::Parallel).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn clamp_renormalizes() {
        let p = clamp_distribution(vec![0.5, -1e-12, 0.5 + 1e-12]);
        assert_eq!(p[1], 0.0);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
