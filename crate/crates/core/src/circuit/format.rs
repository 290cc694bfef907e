//! Line-based circuit format.
//!
//! ```text
//! qubits 3
//! h 0
//! cnot 0 1
//! u1 2  re im re im re im re im
//! un 2 0 1  <32 reals>
//! post 0 0
//! ```
//!
//! `#` starts a comment; blank lines are ignored. `u1`/`u2`/`un` matrices are
//! row-major lists of (re, im) pairs. A gate may not act on a qubit that was
//! already postselected.

use super::{Gate, PostselectedCircuit};
use crate::linalg::{c64, to_row_major, CMatrix, C64};
use crate::text::{parse_f64, parse_usize};
use crate::{Error, Result};

fn matrix(tokens: &[&str], dim: usize, line: usize) -> Result<CMatrix> {
    if tokens.len() != 2 * dim * dim {
        return Err(Error::parse(format!(
            "line {line}: expected {} reals for a {dim}×{dim} matrix, found {}",
            2 * dim * dim,
            tokens.len()
        )));
    }
    let vals = tokens.iter().map(|t| parse_f64(t)).collect::<Result<Vec<_>>>()?;
    let data: Vec<C64> = vals.chunks(2).map(|p| c64(p[0], p[1])).collect();
    Ok(CMatrix::from_row_slice(dim, dim, &data))
}

pub fn circuit_from_text(text: &str) -> Result<PostselectedCircuit> {
    let mut circuit: Option<PostselectedCircuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tok: Vec<&str> = body.split_whitespace().collect();
        let q = |k: usize| -> Result<usize> {
            tok.get(k)
                .ok_or_else(|| Error::parse(format!("line {line}: missing operand")))
                .and_then(|t| parse_usize(t))
        };
        let arity = |n: usize| -> Result<()> {
            if tok.len() != n + 1 {
                return Err(Error::parse(format!(
                    "line {line}: `{}` takes {n} operands",
                    tok[0]
                )));
            }
            Ok(())
        };
        if tok[0] == "qubits" {
            arity(1)?;
            if circuit.is_some() {
                return Err(Error::parse(format!("line {line}: repeated `qubits`")));
            }
            circuit = Some(PostselectedCircuit::new(q(1)?));
            continue;
        }
        let c = circuit
            .as_mut()
            .ok_or_else(|| Error::parse(format!("line {line}: `qubits n` must come first")))?;
        let gate = match tok[0] {
            "h" => {
                arity(1)?;
                Gate::H(q(1)?)
            }
            "x" => {
                arity(1)?;
                Gate::X(q(1)?)
            }
            "cnot" => {
                arity(2)?;
                Gate::Cnot(q(1)?, q(2)?)
            }
            "cz" => {
                arity(2)?;
                Gate::Cz(q(1)?, q(2)?)
            }
            "toffoli" => {
                arity(3)?;
                Gate::Toffoli(q(1)?, q(2)?, q(3)?)
            }
            "u1" => Gate::U1(q(1)?, matrix(&tok[2..], 2, line)?),
            "u2" => Gate::U2(q(1)?, q(2)?, matrix(&tok.get(3..).unwrap_or(&[]), 4, line)?),
            "un" => {
                let k = q(1)?;
                if k == 0 || k > 12 || tok.len() < 2 + k {
                    return Err(Error::parse(format!("line {line}: bad `un` arity")));
                }
                let qs = (0..k).map(|j| q(2 + j)).collect::<Result<Vec<_>>>()?;
                Gate::Un(qs, matrix(&tok[2 + k..], 1 << k, line)?)
            }
            "post" => {
                arity(2)?;
                let v = q(2)?;
                if v > 1 {
                    return Err(Error::parse(format!("line {line}: outcome must be 0 or 1")));
                }
                c.postselect(q(1)?, v as u8)
                    .map_err(|e| Error::parse(format!("line {line}: {e}")))?;
                continue;
            }
            other => return Err(Error::parse(format!("line {line}: unknown gate `{other}`"))),
        };
        let posted = c.postselected_qubits();
        if let Some(&q) = gate.qubits().iter().find(|q| posted.contains(q)) {
            return Err(Error::parse(format!(
                "line {line}: gate acts on qubit {q} after its postselection"
            )));
        }
        c.push(gate)
            .map_err(|e| Error::parse(format!("line {line}: {e}")))?;
    }
    circuit.ok_or_else(|| Error::parse("empty circuit file (missing `qubits n`)"))
}

fn write_matrix(out: &mut String, m: &CMatrix) {
    for z in to_row_major(m) {
        out.push_str(&format!(" {} {}", z.re, z.im));
    }
}

pub fn circuit_to_text(c: &PostselectedCircuit) -> String {
    let mut out = format!("qubits {}\n", c.n_qubits());
    for g in c.gates() {
        match g {
            Gate::H(q) => out.push_str(&format!("h {q}")),
            Gate::X(q) => out.push_str(&format!("x {q}")),
            Gate::Cnot(a, b) => out.push_str(&format!("cnot {a} {b}")),
            Gate::Cz(a, b) => out.push_str(&format!("cz {a} {b}")),
            Gate::Toffoli(a, b, t) => out.push_str(&format!("toffoli {a} {b} {t}")),
            Gate::U1(q, m) => {
                out.push_str(&format!("u1 {q}"));
                write_matrix(&mut out, m);
            }
            Gate::U2(a, b, m) => {
                out.push_str(&format!("u2 {a} {b}"));
                write_matrix(&mut out, m);
            }
            Gate::Un(qs, m) => {
                out.push_str(&format!("un {}", qs.len()));
                for q in qs {
                    out.push_str(&format!(" {q}"));
                }
                write_matrix(&mut out, m);
            }
        }
        out.push('\n');
    }
    for (q, v) in c.postselections() {
        out.push_str(&format!("post {q} {v}\n"));
    }
    out
}
