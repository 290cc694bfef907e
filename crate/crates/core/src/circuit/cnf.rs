//! CNF formulas and the reversible circuit computing Σₓ|x⟩|f(x)⟩.

use super::{Gate, PostselectedCircuit};
use crate::{Error, Result};

/// Conjunctive normal form over variables `1..=n_vars`; a literal `-v`
/// is the negation of variable `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cnf {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i64>>,
}

impl Cnf {
    pub fn new(n_vars: usize, clauses: Vec<Vec<i64>>) -> Result<Self> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > n_vars {
                    return Err(Error::invalid(format!(
                        "literal {l} outside variables 1..={n_vars}"
                    )));
                }
            }
        }
        Ok(Self { n_vars, clauses })
    }

    /// Parses DIMACS `p cnf n m` followed by zero-terminated clauses.
    pub fn from_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for line in text.lines() {
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            if let Some(rest) = t.strip_prefix('p') {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 3 || parts[0] != "cnf" || header.is_some() {
                    return Err(Error::parse(format!("bad DIMACS header `{t}`")));
                }
                let n = crate::text::parse_usize(parts[1])?;
                let m = crate::text::parse_usize(parts[2])?;
                header = Some((n, m));
                continue;
            }
            if header.is_none() {
                return Err(Error::parse("clause before the `p cnf` header"));
            }
            for tok in t.split_whitespace() {
                let l: i64 = tok
                    .parse()
                    .map_err(|_| Error::parse(format!("bad literal `{tok}`")))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut current));
                } else {
                    current.push(l);
                }
            }
        }
        let (n, m) = header.ok_or_else(|| Error::parse("missing `p cnf` header"))?;
        if !current.is_empty() {
            clauses.push(current);
        }
        if clauses.len() != m {
            return Err(Error::parse(format!(
                "header declares {m} clauses, found {}",
                clauses.len()
            )));
        }
        Self::new(n, clauses).map_err(|e| Error::parse(e.to_string()))
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n_vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                out.push_str(&format!("{l} "));
            }
            out.push_str("0\n");
        }
        out
    }

    /// Evaluates with variable `v` read from bit `n_vars − v` of `x`
    /// (variable 1 is the most significant bit, matching qubit 0).
    pub fn eval(&self, x: u64) -> bool {
        let value = |l: i64| {
            let v = l.unsigned_abs() as usize;
            let bit = (x >> (self.n_vars - v)) & 1 == 1;
            if l > 0 {
                bit
            } else {
                !bit
            }
        };
        self.clauses.iter().all(|c| c.iter().any(|&l| value(l)))
    }

    /// Number of satisfying assignments by truth table.
    pub fn count_models(&self) -> u64 {
        (0..1u64 << self.n_vars).filter(|&x| self.eval(x)).count() as u64
    }
}

/// Circuit for a CNF together with the location of its registers.
#[derive(Clone, Debug)]
pub struct CnfCircuit {
    pub circuit: PostselectedCircuit,
    /// qubit holding f(x)
    pub output: usize,
    pub n_vars: usize,
}

struct Builder {
    gates: Vec<Gate>,
    n_qubits: usize,
}

impl Builder {
    fn fresh(&mut self) -> usize {
        self.n_qubits += 1;
        self.n_qubits - 1
    }

    /// Gates writing AND(qs) into `target` (assumed |0⟩), using `scratch`
    /// for the 3-input case. Returns the gate list so it can be undone.
    fn and_into(&mut self, qs: &[usize], target: usize, scratch: &mut Option<usize>) -> Vec<Gate> {
        match *qs {
            [] => vec![Gate::X(target)],
            [a] => vec![Gate::Cnot(a, target)],
            [a, b] => vec![Gate::Toffoli(a, b, target)],
            [a, b, c] => {
                let t = *scratch.get_or_insert_with(|| self.fresh());
                vec![
                    Gate::Toffoli(a, b, t),
                    Gate::Toffoli(t, c, target),
                    Gate::Toffoli(a, b, t),
                ]
            }
            _ => unreachable!("clauses are split to width 3"),
        }
    }

    /// Writes OR(literals) into a fresh qubit via De Morgan; returns the
    /// gates and the qubit.
    fn or_of(&mut self, lits: &[(usize, bool)], scratch: &mut Option<usize>) -> (Vec<Gate>, usize) {
        let target = self.fresh();
        let flips: Vec<Gate> = lits
            .iter()
            .filter(|&&(_, positive)| positive)
            .map(|&(q, _)| Gate::X(q))
            .collect();
        let qs: Vec<usize> = lits.iter().map(|&(q, _)| q).collect();
        let mut gates = flips.clone();
        gates.extend(self.and_into(&qs, target, scratch));
        gates.push(Gate::X(target));
        gates.extend(flips);
        (gates, target)
    }
}

/// Builds the circuit H^{⊗n} on A = qubits 0..n, evaluates every clause into
/// its own ancilla, ANDs the clause ancillas into B = qubit n with a Toffoli
/// tree, then uncomputes every intermediate. The final state is
/// 2^{−n/2} Σₓ |x⟩_A |f(x)⟩_B |0⟩_anc.
///
/// Literals are deduplicated and tautological clauses dropped. Clauses wider
/// than three are split: the OR of a chunk of three literals is computed into
/// an ancilla that then stands in as a positive literal, so the model count
/// is unchanged.
pub fn cnf_oracle_circuit(f: &Cnf) -> Result<CnfCircuit> {
    let n = f.n_vars;
    let output = n;
    let mut b = Builder {
        gates: (0..n).map(Gate::H).collect(),
        n_qubits: n + 1,
    };
    let mut scratch: Option<usize> = None;
    let mut compute: Vec<Vec<Gate>> = Vec::new();
    let mut clause_bits = Vec::new();

    for clause in &f.clauses {
        let mut lits: Vec<(usize, bool)> = Vec::new();
        let mut tautology = false;
        for &l in clause {
            let lit = (l.unsigned_abs() as usize - 1, l > 0);
            if lits.contains(&(lit.0, !lit.1)) {
                tautology = true;
            }
            if !lits.contains(&lit) {
                lits.push(lit);
            }
        }
        if tautology {
            continue;
        }
        while lits.len() > 3 {
            let chunk: Vec<(usize, bool)> = lits.drain(..3).collect();
            let (gates, q) = b.or_of(&chunk, &mut scratch);
            compute.push(gates);
            lits.push((q, true));
        }
        if lits.is_empty() {
            // empty clause: constant false, ancilla stays |0⟩
            let q = b.fresh();
            clause_bits.push(q);
            continue;
        }
        let (gates, q) = b.or_of(&lits, &mut scratch);
        compute.push(gates);
        clause_bits.push(q);
    }

    // AND tree over clause ancillas; the last AND lands on B
    let mut level = clause_bits;
    while level.len() > 3 {
        let mut next = Vec::new();
        for pair in level.chunks(2) {
            if let [x, y] = *pair {
                let t = b.fresh();
                compute.push(vec![Gate::Toffoli(x, y, t)]);
                next.push(t);
            } else {
                next.push(pair[0]);
            }
        }
        level = next;
    }
    let final_and = b.and_into(&level, output, &mut scratch);

    let mut gates = std::mem::take(&mut b.gates);
    for block in &compute {
        gates.extend(block.iter().cloned());
    }
    gates.extend(final_and);
    for block in compute.iter().rev() {
        gates.extend(block.iter().rev().cloned());
    }
    let circuit = PostselectedCircuit::from_parts(b.n_qubits, gates, vec![])?;
    Ok(CnfCircuit {
        circuit,
        output,
        n_vars: n,
    })
}
