//! Exact pure-state simulation.
//!
//! Qubit 0 is the most significant bit of a basis-state index: on three
//! qubits, `|q0 q1 q2⟩ = |1 0 0⟩` is amplitude index 4. Every module in the
//! crate relies on this convention when it splits or reassembles registers.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("control and target are both qubit {0}")]
    ControlIsTarget(usize),
    #[error("observable acts on {observable} qubits but the state has {state}")]
    QubitCountMismatch { observable: usize, state: usize },
    #[error("register size {0} is not supported (1..={MAX_QUBITS} qubits)")]
    InvalidRegister(usize),
    #[error("amplitude vector length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("state norm {0} deviates from 1")]
    NotNormalized(f64),
    #[error("unknown eigenstate label {0:?}")]
    UnknownEigenstate(String),
    #[error("unknown Pauli label {0:?}")]
    UnknownPauli(char),
}

/// Gate kinds supported by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    #[serde(rename = "H")]
    H,
    #[serde(rename = "RY")]
    Ry,
    #[serde(rename = "RZ")]
    Rz,
    #[serde(rename = "CRY")]
    Cry,
    #[serde(rename = "CNOT")]
    Cnot,
}

impl GateKind {
    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cry => "CRY",
            GateKind::Cnot => "CNOT",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::Ry | GateKind::Rz => 1,
            GateKind::Cry | GateKind::Cnot => 2,
        }
    }

    pub fn is_parametric(self) -> bool {
        matches!(self, GateKind::Ry | GateKind::Rz | GateKind::Cry)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H" => Ok(GateKind::H),
            "RY" => Ok(GateKind::Ry),
            "RZ" => Ok(GateKind::Rz),
            "CRY" => Ok(GateKind::Cry),
            "CNOT" => Ok(GateKind::Cnot),
            other => Err(other.to_string()),
        }
    }
}

/// A gate application. The angle type is generic so that circuits can carry
/// symbolic parameters; the simulator consumes `Gate<f64>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate<A = f64> {
    H {
        target: usize,
    },
    Ry {
        target: usize,
        theta: A,
    },
    Rz {
        target: usize,
        phi: A,
    },
    Cry {
        control: usize,
        target: usize,
        theta: A,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

impl<A> Gate<A> {
    pub fn kind(&self) -> GateKind {
        match self {
            Gate::H { .. } => GateKind::H,
            Gate::Ry { .. } => GateKind::Ry,
            Gate::Rz { .. } => GateKind::Rz,
            Gate::Cry { .. } => GateKind::Cry,
            Gate::Cnot { .. } => GateKind::Cnot,
        }
    }

    /// Qubits touched by the gate, control first for two-qubit gates.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H { target } | Gate::Ry { target, .. } | Gate::Rz { target, .. } => {
                vec![target]
            }
            Gate::Cry {
                control, target, ..
            }
            | Gate::Cnot { control, target } => {
                vec![control, target]
            }
        }
    }

    pub fn touches(&self, qubit: usize) -> bool {
        self.qubits().contains(&qubit)
    }

    pub fn angle(&self) -> Option<&A> {
        match self {
            Gate::Ry { theta, .. } | Gate::Cry { theta, .. } => Some(theta),
            Gate::Rz { phi, .. } => Some(phi),
            Gate::H { .. } | Gate::Cnot { .. } => None,
        }
    }

    pub fn angle_mut(&mut self) -> Option<&mut A> {
        match self {
            Gate::Ry { theta, .. } | Gate::Cry { theta, .. } => Some(theta),
            Gate::Rz { phi, .. } => Some(phi),
            Gate::H { .. } | Gate::Cnot { .. } => None,
        }
    }

    /// Rebuilds the gate with a transformed angle, leaving wires untouched.
    pub fn try_map_angle<B, E>(self, f: impl FnOnce(A) -> Result<B, E>) -> Result<Gate<B>, E> {
        Ok(match self {
            Gate::H { target } => Gate::H { target },
            Gate::Ry { target, theta } => Gate::Ry {
                target,
                theta: f(theta)?,
            },
            Gate::Rz { target, phi } => Gate::Rz {
                target,
                phi: f(phi)?,
            },
            Gate::Cry {
                control,
                target,
                theta,
            } => Gate::Cry {
                control,
                target,
                theta: f(theta)?,
            },
            Gate::Cnot { control, target } => Gate::Cnot { control, target },
        })
    }

    pub fn map_angle<B>(self, f: impl FnOnce(A) -> B) -> Gate<B> {
        match self.try_map_angle::<B, std::convert::Infallible>(|a| Ok(f(a))) {
            Ok(g) => g,
            Err(never) => match never {},
        }
    }

    /// Rebuilds the gate with every wire index passed through `f`.
    pub fn map_qubits(self, mut f: impl FnMut(usize) -> usize) -> Gate<A> {
        match self {
            Gate::H { target } => Gate::H { target: f(target) },
            Gate::Ry { target, theta } => Gate::Ry {
                target: f(target),
                theta,
            },
            Gate::Rz { target, phi } => Gate::Rz {
                target: f(target),
                phi,
            },
            Gate::Cry {
                control,
                target,
                theta,
            } => Gate::Cry {
                control: f(control),
                target: f(target),
                theta,
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: f(control),
                target: f(target),
            },
        }
    }

    /// Checks wire indices against a register of `n_qubits`.
    pub fn validate(&self, n_qubits: usize) -> Result<(), SimError> {
        let qubits = self.qubits();
        if let Some(&index) = qubits.iter().find(|&&q| q >= n_qubits) {
            return Err(SimError::QubitOutOfRange { index, n_qubits });
        }
        if qubits.len() == 2 && qubits[0] == qubits[1] {
            return Err(SimError::ControlIsTarget(qubits[0]));
        }
        Ok(())
    }
}

type Mat2 = [[Complex64; 2]; 2];

fn hadamard() -> Mat2 {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

fn ry(theta: f64) -> Mat2 {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

fn rz(phi: f64) -> Mat2 {
    [
        [Complex64::from_polar(1.0, -phi / 2.0), ZERO],
        [ZERO, Complex64::from_polar(1.0, phi / 2.0)],
    ]
}

fn pauli_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

impl Gate<f64> {
    /// Dense unitary of the gate on its own qubits (control is the high bit).
    pub fn matrix(&self) -> Vec<Vec<Complex64>> {
        let single = |m: Mat2| m.iter().map(|row| row.to_vec()).collect();
        let controlled = |m: Mat2| {
            let mut u = vec![vec![ZERO; 4]; 4];
            u[0][0] = ONE;
            u[1][1] = ONE;
            for r in 0..2 {
                for c in 0..2 {
                    u[2 + r][2 + c] = m[r][c];
                }
            }
            u
        };
        match *self {
            Gate::H { .. } => single(hadamard()),
            Gate::Ry { theta, .. } => single(ry(theta)),
            Gate::Rz { phi, .. } => single(rz(phi)),
            Gate::Cry { theta, .. } => controlled(ry(theta)),
            Gate::Cnot { .. } => controlled(pauli_x()),
        }
    }
}

/// Pure state of `n_qubits` qubits as `2^n` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zero basis state `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self, SimError> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self, SimError> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(SimError::InvalidRegister(n_qubits));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(SimError::QubitOutOfRange { index, n_qubits });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps raw amplitudes; the vector must be normalized within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self, SimError> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(SimError::NotPowerOfTwo(len));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(SimError::InvalidRegister(n_qubits));
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SimError::NotNormalized(norm));
        }
        Ok(state)
    }

    /// `first ⊗ |0…0⟩` on `first.n_qubits() + rest` qubits, with `first`
    /// occupying the leading (most significant) qubits.
    pub fn with_trailing_zeros(first: &StateVector, rest: usize) -> Result<Self, SimError> {
        let n_qubits = first.n_qubits + rest;
        if n_qubits > MAX_QUBITS {
            return Err(SimError::InvalidRegister(n_qubits));
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        for (i, a) in first.amplitudes.iter().enumerate() {
            amplitudes[i << rest] = *a;
        }
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Returns a new state with `gate` applied.
    pub fn apply_gate(&self, gate: &Gate<f64>) -> Result<StateVector, SimError> {
        let mut next = self.clone();
        next.apply_in_place(gate)?;
        Ok(next)
    }

    pub fn apply_in_place(&mut self, gate: &Gate<f64>) -> Result<(), SimError> {
        gate.validate(self.n_qubits)?;
        match *gate {
            Gate::H { target } => self.apply_single(target, &hadamard()),
            Gate::Ry { target, theta } => self.apply_single(target, &ry(theta)),
            Gate::Rz { target, phi } => self.apply_diagonal(target, rz(phi)[0][0], rz(phi)[1][1]),
            Gate::Cry {
                control,
                target,
                theta,
            } => self.apply_controlled(control, target, &ry(theta)),
            Gate::Cnot { control, target } => self.apply_cnot(control, target),
        }
        Ok(())
    }

    /// Applies a gate sequence in order.
    pub fn run<'a>(
        &mut self,
        gates: impl IntoIterator<Item = &'a Gate<f64>>,
    ) -> Result<(), SimError> {
        for gate in gates {
            self.apply_in_place(gate)?;
        }
        Ok(())
    }

    fn apply_single(&mut self, target: usize, m: &Mat2) {
        let mask = self.mask(target);
        let dim = self.amplitudes.len();
        for block in (0..dim).step_by(mask << 1) {
            for i in block..block + mask {
                let j = i | mask;
                let (x, y) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m[0][0] * x + m[0][1] * y;
                self.amplitudes[j] = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    fn apply_diagonal(&mut self, target: usize, d0: Complex64, d1: Complex64) {
        let mask = self.mask(target);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            *a *= if i & mask == 0 { d0 } else { d1 };
        }
    }

    fn apply_controlled(&mut self, control: usize, target: usize, m: &Mat2) {
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                let j = i | tmask;
                let (x, y) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m[0][0] * x + m[0][1] * y;
                self.amplitudes[j] = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let cmask = self.mask(control);
        let tmask = self.mask(target);
        for i in 0..self.amplitudes.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    /// `⟨ψ|O|ψ⟩` for a Pauli string.
    pub fn expectation(&self, obs: &PauliString) -> Result<f64, SimError> {
        if obs.n_qubits() != self.n_qubits {
            return Err(SimError::QubitCountMismatch {
                observable: obs.n_qubits(),
                state: self.n_qubits,
            });
        }
        let (mut xmask, mut zmask, mut n_y) = (0usize, 0usize, 0u32);
        for (q, p) in obs.factors().iter().enumerate() {
            let m = self.mask(q);
            match p {
                Pauli::I => {}
                Pauli::X => xmask |= m,
                Pauli::Z => zmask |= m,
                Pauli::Y => {
                    xmask |= m;
                    zmask |= m;
                    n_y += 1;
                }
            }
        }
        // O|i⟩ = i^{n_y} (-1)^{|i & zmask|} |i ^ xmask⟩
        let mut acc = ZERO;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let term = self.amplitudes[i ^ xmask].conj() * a;
            if (i & zmask).count_ones() % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        let value = acc * I.powu(n_y);
        debug_assert!(value.im.abs() < 1e-10, "non-real expectation {value}");
        Ok(value.re)
    }

    /// Computational-basis probabilities `|a_b|²`, indexed by basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    pub fn label(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl TryFrom<char> for Pauli {
    type Error = SimError;

    fn try_from(c: char) -> Result<Self, Self::Error> {
        match c {
            'I' => Ok(Pauli::I),
            'X' => Ok(Pauli::X),
            'Y' => Ok(Pauli::Y),
            'Z' => Ok(Pauli::Z),
            other => Err(SimError::UnknownPauli(other)),
        }
    }
}

/// Tensor product of per-qubit Paulis; factor `k` acts on qubit `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<Pauli>,
}

impl PauliString {
    pub fn new(factors: Vec<Pauli>) -> Self {
        Self { factors }
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self::new(vec![Pauli::I; n_qubits])
    }

    /// Single non-identity factor on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Self {
        let mut factors = vec![Pauli::I; n_qubits];
        factors[qubit] = pauli;
        Self::new(factors)
    }

    pub fn n_qubits(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Pauli] {
        &self.factors
    }

    /// `self ⊗ other`, with `self` on the leading qubits.
    pub fn tensor(&self, other: &PauliString) -> PauliString {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self::new(factors)
    }

    pub fn with_factor(&self, pauli: Pauli) -> PauliString {
        let mut factors = self.factors.clone();
        factors.push(pauli);
        Self::new(factors)
    }
}

impl FromStr for PauliString {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(Pauli::try_from)
            .collect::<Result<Vec<_>, _>>()
            .map(Self::new)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.factors {
            write!(f, "{}", p.label())?;
        }
        Ok(())
    }
}

/// The six single-qubit Pauli eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Eigenstate {
    Zero,
    One,
    Plus,
    Minus,
    PlusI,
    MinusI,
}

impl Eigenstate {
    pub const ALL: [Eigenstate; 6] = [
        Eigenstate::Zero,
        Eigenstate::One,
        Eigenstate::Plus,
        Eigenstate::Minus,
        Eigenstate::PlusI,
        Eigenstate::MinusI,
    ];

    pub fn amplitudes(self) -> [Complex64; 2] {
        let h = FRAC_1_SQRT_2;
        match self {
            Eigenstate::Zero => [ONE, ZERO],
            Eigenstate::One => [ZERO, ONE],
            Eigenstate::Plus => [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            Eigenstate::Minus => [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
            Eigenstate::PlusI => [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
            Eigenstate::MinusI => [Complex64::new(h, 0.0), Complex64::new(0.0, -h)],
        }
    }

    /// The Pauli this state diagonalizes, with its eigenvalue.
    pub fn eigen_pair(self) -> (Pauli, f64) {
        match self {
            Eigenstate::Zero => (Pauli::Z, 1.0),
            Eigenstate::One => (Pauli::Z, -1.0),
            Eigenstate::Plus => (Pauli::X, 1.0),
            Eigenstate::Minus => (Pauli::X, -1.0),
            Eigenstate::PlusI => (Pauli::Y, 1.0),
            Eigenstate::MinusI => (Pauli::Y, -1.0),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Eigenstate::Zero => "0",
            Eigenstate::One => "1",
            Eigenstate::Plus => "+",
            Eigenstate::Minus => "-",
            Eigenstate::PlusI => "+i",
            Eigenstate::MinusI => "-i",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl FromStr for Eigenstate {
    type Err = SimError;

    /// Accepts `0`, `1`, `+`, `-`, `+i`, `-i`, optionally written as kets.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bare = s
            .trim()
            .trim_start_matches('|')
            .trim_end_matches(['⟩', '>'])
            .replace('−', "-");
        Ok(match bare.as_str() {
            "0" => Eigenstate::Zero,
            "1" => Eigenstate::One,
            "+" => Eigenstate::Plus,
            "-" => Eigenstate::Minus,
            "+i" => Eigenstate::PlusI,
            "-i" => Eigenstate::MinusI,
            _ => return Err(SimError::UnknownEigenstate(s.to_string())),
        })
    }
}

impl fmt::Display for Eigenstate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}⟩", self.label())
    }
}

/// Single-qubit state for a Pauli eigenstate.
pub fn prepare_eigenstate(label: Eigenstate) -> StateVector {
    StateVector {
        n_qubits: 1,
        amplitudes: label.amplitudes().to_vec(),
    }
}
