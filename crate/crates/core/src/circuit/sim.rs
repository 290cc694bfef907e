//! Sparse exact statevector simulation.
//!
//! States are kept as sorted (basis index, amplitude) lists. Compiled PEPS
//! circuits use many qubits but keep most of them in computational basis
//! states, so the support stays far below 2^n.

use std::collections::HashMap;

use super::{Gate, PostselectedCircuit};
use crate::linalg::{C64, ONE, ZERO};
use crate::par::{map_indexed, Execution};
use crate::{Error, Result};

/// Default qubit cap. Basis indices are 64-bit, and the support cap below is
/// the real resource bound.
pub const DEFAULT_MAX_QUBITS: usize = 40;

/// Amplitudes below this magnitude are dropped from the support.
const PRUNE: f64 = 1e-20;

#[derive(Clone, Copy, Debug)]
pub struct SimOptions {
    pub max_qubits: usize,
    pub max_support: usize,
    pub execution: Execution,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            max_qubits: DEFAULT_MAX_QUBITS,
            max_support: 1 << 24,
            execution: Execution::default(),
        }
    }
}

/// Sparse state on `n` qubits, qubit 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    entries: Vec<(u64, C64)>,
}

impl StateVector {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![(0, ONE)],
        }
    }

    pub fn from_dense(amps: &[C64]) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::invalid("dense state length must be a power of two"));
        }
        let n = amps.len().trailing_zeros() as usize;
        let entries = amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != ZERO)
            .map(|(i, &a)| (i as u64, a))
            .collect();
        Ok(Self { n, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Nonzero entries sorted by basis index.
    pub fn entries(&self) -> &[(u64, C64)] {
        &self.entries
    }

    pub fn amplitude(&self, x: u64) -> C64 {
        match self.entries.binary_search_by_key(&x, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => ZERO,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn to_dense(&self) -> Result<Vec<C64>> {
        if self.n > 26 {
            return Err(Error::Cap(format!("dense vector on {} qubits", self.n)));
        }
        let mut out = vec![ZERO; 1 << self.n];
        for &(x, a) in &self.entries {
            out[x as usize] = a;
        }
        Ok(out)
    }

    fn bit(&self, q: usize) -> u32 {
        (self.n - 1 - q) as u32
    }

    /// Dense reduced state on `qubits` (in order) after projecting the
    /// remaining qubits onto the basis states in `rest`; entries whose other
    /// qubits disagree with `rest` are ignored.
    pub fn slice(&self, qubits: &[usize], rest: &[(usize, u8)]) -> Vec<C64> {
        let mut out = vec![ZERO; 1 << qubits.len()];
        'entries: for &(x, a) in &self.entries {
            for &(q, v) in rest {
                if (x >> self.bit(q)) & 1 != v as u64 {
                    continue 'entries;
                }
            }
            let idx = qubits
                .iter()
                .fold(0usize, |acc, &q| (acc << 1) | ((x >> self.bit(q)) & 1) as usize);
            out[idx] += a;
        }
        out
    }

    /// Reduced density matrix on `qubits` (rows and columns row-major over
    /// `qubits` in order), tracing out everything else.
    pub fn reduced_density_matrix(&self, qubits: &[usize]) -> crate::linalg::CMatrix {
        let k = qubits.len();
        let mask: u64 = qubits.iter().map(|&q| 1u64 << self.bit(q)).sum();
        let mut groups: HashMap<u64, Vec<(usize, C64)>> = HashMap::new();
        for &(x, a) in &self.entries {
            let idx = qubits
                .iter()
                .fold(0usize, |acc, &q| (acc << 1) | ((x >> self.bit(q)) & 1) as usize);
            groups.entry(x & !mask).or_default().push((idx, a));
        }
        let mut keys: Vec<u64> = groups.keys().copied().collect();
        keys.sort_unstable();
        let mut rho = crate::linalg::CMatrix::zeros(1 << k, 1 << k);
        for key in keys {
            let g = &groups[&key];
            for &(i, a) in g {
                for &(j, b) in g {
                    rho[(i, j)] += a * b.conj();
                }
            }
        }
        rho
    }

    fn apply(&mut self, gate: &Gate, opts: &SimOptions) -> Result<()> {
        let qs = gate.qubits();
        let bits: Vec<u32> = qs.iter().map(|&q| self.bit(q)).collect();
        match gate {
            Gate::X(_) | Gate::Cnot(..) | Gate::Toffoli(..) => {
                let target = 1u64 << bits[bits.len() - 1];
                let controls: u64 = bits[..bits.len() - 1].iter().map(|&b| 1u64 << b).sum();
                for e in &mut self.entries {
                    if e.0 & controls == controls {
                        e.0 ^= target;
                    }
                }
                self.entries.sort_unstable_by_key(|e| e.0);
            }
            Gate::Cz(..) => {
                let both = (1u64 << bits[0]) | (1u64 << bits[1]);
                for e in &mut self.entries {
                    if e.0 & both == both {
                        e.1 = -e.1;
                    }
                }
            }
            _ => self.apply_dense_block(&bits, &gate.matrix(), opts)?,
        }
        Ok(())
    }

    fn apply_dense_block(
        &mut self,
        bits: &[u32],
        m: &crate::linalg::CMatrix,
        opts: &SimOptions,
    ) -> Result<()> {
        let k = bits.len();
        let mask: u64 = bits.iter().map(|&b| 1u64 << b).sum();
        let local = |x: u64| {
            bits.iter()
                .fold(0usize, |acc, &b| (acc << 1) | ((x >> b) & 1) as usize)
        };
        let spread = |base: u64, l: usize| {
            let mut x = base;
            for (pos, &b) in bits.iter().enumerate() {
                if (l >> (k - 1 - pos)) & 1 == 1 {
                    x |= 1u64 << b;
                }
            }
            x
        };
        let mut groups: HashMap<u64, Vec<C64>> = HashMap::new();
        for &(x, a) in &self.entries {
            groups.entry(x & !mask).or_insert_with(|| vec![ZERO; 1 << k])[local(x)] = a;
        }
        let mut bases: Vec<u64> = groups.keys().copied().collect();
        bases.sort_unstable();
        let dim = 1usize << k;
        let blocks: Vec<Vec<(u64, C64)>> = map_indexed(opts.execution, bases.len(), |i| {
            let v = &groups[&bases[i]];
            let mut out = Vec::new();
            for r in 0..dim {
                let mut acc = ZERO;
                for (c, &a) in v.iter().enumerate() {
                    if a != ZERO {
                        acc += m[(r, c)] * a;
                    }
                }
                if acc.norm() > PRUNE {
                    out.push((spread(bases[i], r), acc));
                }
            }
            out
        });
        let total: usize = blocks.iter().map(Vec::len).sum();
        if total > opts.max_support {
            return Err(Error::Cap(format!(
                "state support {total} exceeds {}",
                opts.max_support
            )));
        }
        let mut entries = Vec::with_capacity(total);
        for b in blocks {
            entries.extend(b);
        }
        entries.sort_unstable_by_key(|e| e.0);
        self.entries = entries;
        Ok(())
    }
}

/// Runs the circuit from |0…0⟩, then applies each postselection as a
/// projector followed by renormalization. Returns the normalized final state
/// and the product of the conditional postselection probabilities.
pub fn simulate(c: &PostselectedCircuit) -> Result<(StateVector, f64)> {
    simulate_with(c, &SimOptions::default())
}

pub fn simulate_with(c: &PostselectedCircuit, opts: &SimOptions) -> Result<(StateVector, f64)> {
    let n = c.n_qubits();
    if n > opts.max_qubits.min(64) {
        return Err(Error::Cap(format!(
            "{n} qubits exceed the simulator cap {}",
            opts.max_qubits
        )));
    }
    let mut state = StateVector::zero(n);
    for g in c.gates() {
        state.apply(g, opts)?;
    }
    let mut p_success = 1.0;
    for &(q, v) in c.postselections() {
        let bit = state.bit(q);
        let total = state.norm_sqr();
        let kept: Vec<(u64, C64)> = state
            .entries
            .iter()
            .copied()
            .filter(|&(x, _)| (x >> bit) & 1 == v as u64)
            .collect();
        let part: f64 = kept.iter().map(|(_, a)| a.norm_sqr()).sum();
        let p = part / total;
        if !(p >= 1e-14) {
            return Err(Error::InvalidPostselection {
                qubit: q,
                probability: p,
            });
        }
        let scale = 1.0 / part.sqrt();
        state.entries = kept.into_iter().map(|(x, a)| (x, a * scale)).collect();
        p_success *= p;
    }
    Ok((state, p_success))
}

/// ⟨x|U|0…0⟩ for a circuit without postselections; `x` is read with qubit 0
/// as its most significant bit.
pub fn amplitude(c: &PostselectedCircuit, x: u64) -> Result<C64> {
    if !c.postselections().is_empty() {
        return Err(Error::invalid("amplitude needs a circuit without postselections"));
    }
    if c.n_qubits() < 64 && x >> c.n_qubits() != 0 {
        return Err(Error::invalid(format!(
            "bitstring {x} has more than {} bits",
            c.n_qubits()
        )));
    }
    Ok(simulate(c)?.0.amplitude(x))
}
