use serde::{Deserialize, Serialize};

use crate::statevector::{Eigenstate, Pauli};

/// One measure-and-prepare term of the single-wire cut: measure `observable`
/// on the upstream side, prepare `eigenstate` downstream, weight by
/// `coefficient`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutTerm {
    /// 1-based position in the term table.
    pub index: usize,
    pub observable: Pauli,
    pub eigenstate: Eigenstate,
    pub coefficient: f64,
}

const fn term(
    index: usize,
    observable: Pauli,
    eigenstate: Eigenstate,
    coefficient: f64,
) -> CutTerm {
    CutTerm {
        index,
        observable,
        eigenstate,
        coefficient,
    }
}

/// The eight terms, in index order. Their weighted sum
/// `Σ c_m Tr(O_m ρ) |ψ_m⟩⟨ψ_m|` equals `ρ` for every single-qubit density.
pub const CUT_TERMS: [CutTerm; 8] = [
    term(1, Pauli::I, Eigenstate::Zero, 0.5),
    term(2, Pauli::I, Eigenstate::One, 0.5),
    term(3, Pauli::X, Eigenstate::Plus, 0.5),
    term(4, Pauli::X, Eigenstate::Minus, -0.5),
    term(5, Pauli::Y, Eigenstate::PlusI, 0.5),
    term(6, Pauli::Y, Eigenstate::MinusI, -0.5),
    term(7, Pauli::Z, Eigenstate::Zero, 0.5),
    term(8, Pauli::Z, Eigenstate::One, -0.5),
];

pub fn cut_terms() -> [CutTerm; 8] {
    CUT_TERMS
}
