//! Postselected quantum circuits with exact statevector semantics.
//!
//! Qubit 0 is the most significant bit of every basis index. Postselections
//! act after all gates; a qubit may be postselected at most once and no gate
//! may touch it afterwards in the text format.

mod cnf;
mod format;
mod sim;

pub use cnf::{cnf_oracle_circuit, Cnf, CnfCircuit};
pub use format::{circuit_from_text, circuit_to_text};
pub use sim::{amplitude, simulate, simulate_with, SimOptions, StateVector, DEFAULT_MAX_QUBITS};

use crate::linalg::{c64, from_row_major, hadamard, is_unitary, pauli_x, CMatrix, ONE};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    H(usize),
    X(usize),
    /// (control, target)
    Cnot(usize, usize),
    Cz(usize, usize),
    /// (control, control, target)
    Toffoli(usize, usize, usize),
    U1(usize, CMatrix),
    U2(usize, usize, CMatrix),
    /// Unitary on any number of qubits; the first listed qubit is the most
    /// significant index of the matrix.
    Un(Vec<usize>, CMatrix),
}

impl Gate {
    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::H(q) | Gate::X(q) | Gate::U1(q, _) => vec![*q],
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::U2(a, b, _) => vec![*a, *b],
            Gate::Toffoli(a, b, c) => vec![*a, *b, *c],
            Gate::Un(qs, _) => qs.clone(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::H(_) => "h",
            Gate::X(_) => "x",
            Gate::Cnot(..) => "cnot",
            Gate::Cz(..) => "cz",
            Gate::Toffoli(..) => "toffoli",
            Gate::U1(..) => "u1",
            Gate::U2(..) => "u2",
            Gate::Un(..) => "un",
        }
    }

    /// Member of the Toffoli–Hadamard set {H, X, CNOT, TOFFOLI}.
    pub fn is_toffoli_hadamard(&self) -> bool {
        matches!(self, Gate::H(_) | Gate::X(_) | Gate::Cnot(..) | Gate::Toffoli(..))
    }

    /// Classical reversible gate (basis permutation).
    pub fn is_permutation(&self) -> bool {
        matches!(self, Gate::X(_) | Gate::Cnot(..) | Gate::Toffoli(..))
    }

    /// Matrix on `qubits()` in order, first qubit most significant.
    pub fn matrix(&self) -> CMatrix {
        let perm = |n: usize, f: &dyn Fn(usize) -> usize| {
            let mut m = CMatrix::zeros(n, n);
            for i in 0..n {
                m[(f(i), i)] = ONE;
            }
            m
        };
        match self {
            Gate::H(_) => hadamard(),
            Gate::X(_) => pauli_x(),
            Gate::Cnot(..) => perm(4, &|i| if i >= 2 { i ^ 1 } else { i }),
            Gate::Toffoli(..) => perm(8, &|i| if i >= 6 { i ^ 1 } else { i }),
            Gate::Cz(..) => {
                let mut m = crate::linalg::identity(4);
                m[(3, 3)] = c64(-1.0, 0.0);
                m
            }
            Gate::U1(_, m) | Gate::U2(_, _, m) | Gate::Un(_, m) => m.clone(),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        if qs.is_empty() {
            return Err(Error::invalid("gate acts on no qubits"));
        }
        for (i, &q) in qs.iter().enumerate() {
            if q >= n_qubits {
                return Err(Error::invalid(format!(
                    "{} acts on qubit {q} outside 0..{n_qubits}",
                    self.name()
                )));
            }
            if qs[..i].contains(&q) {
                return Err(Error::invalid(format!("{} repeats qubit {q}", self.name())));
            }
        }
        if let Gate::U1(_, m) | Gate::U2(_, _, m) | Gate::Un(_, m) = self {
            let dim = 1usize << qs.len();
            if m.shape() != (dim, dim) {
                return Err(Error::invalid(format!(
                    "{} matrix must be {dim}×{dim}",
                    self.name()
                )));
            }
            if !is_unitary(m, 1e-10) {
                return Err(Error::invalid(format!("{} matrix is not unitary", self.name())));
            }
        }
        Ok(())
    }
}

/// Gates applied to |0…0⟩ followed by projections onto fixed outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct PostselectedCircuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    posts: Vec<(usize, u8)>,
}

impl PostselectedCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
            posts: Vec::new(),
        }
    }

    pub fn from_parts(n_qubits: usize, gates: Vec<Gate>, posts: Vec<(usize, u8)>) -> Result<Self> {
        let mut c = Self::new(n_qubits);
        for g in gates {
            c.push(g)?;
        }
        for (q, v) in posts {
            c.postselect(q, v)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<&mut Self> {
        g.validate(self.n_qubits)?;
        self.gates.push(g);
        Ok(self)
    }

    pub fn postselect(&mut self, qubit: usize, outcome: u8) -> Result<&mut Self> {
        if qubit >= self.n_qubits {
            return Err(Error::invalid(format!("postselection on missing qubit {qubit}")));
        }
        if outcome > 1 {
            return Err(Error::invalid(format!(
                "postselection outcome {outcome} is not a bit"
            )));
        }
        if self.posts.iter().any(|&(q, _)| q == qubit) {
            return Err(Error::invalid(format!("qubit {qubit} postselected twice")));
        }
        self.posts.push((qubit, outcome));
        Ok(self)
    }

    /// Adds `extra` fresh qubits at the end (least significant positions).
    pub fn add_qubits(&mut self, extra: usize) -> std::ops::Range<usize> {
        let start = self.n_qubits;
        self.n_qubits += extra;
        start..self.n_qubits
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn postselections(&self) -> &[(usize, u8)] {
        &self.posts
    }

    pub fn without_postselections(&self) -> Self {
        Self {
            n_qubits: self.n_qubits,
            gates: self.gates.clone(),
            posts: Vec::new(),
        }
    }

    pub fn h_count(&self) -> usize {
        self.gates.iter().filter(|g| matches!(g, Gate::H(_))).count()
    }

    pub fn is_toffoli_hadamard(&self) -> bool {
        self.gates.iter().all(Gate::is_toffoli_hadamard)
    }

    /// Postselected qubits in postselection order.
    pub fn postselected_qubits(&self) -> Vec<usize> {
        self.posts.iter().map(|&(q, _)| q).collect()
    }
}

/// 2×2 unitary from Z-Y-Z Euler angles: Rz(φ) Ry(θ) Rz(λ) up to phase.
pub fn zyz_unitary(phi: f64, theta: f64, lambda: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = |a: f64| c64(a.cos(), a.sin());
    from_row_major(
        2,
        2,
        &[
            e(-(phi + lambda) / 2.0) * c,
            -e(-(phi - lambda) / 2.0) * s,
            e((phi - lambda) / 2.0) * s,
            e((phi + lambda) / 2.0) * c,
        ],
    )
}
