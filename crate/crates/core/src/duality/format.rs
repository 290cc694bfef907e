//! Text form of compiled artifacts: the underlying PEPS or circuit document
//! preceded by `# scale <γ>` and `# outputs ...` header lines.
//!
//! For a compiled PEPS, `outputs` lists the vertex of every qubit. For a
//! compiled circuit it lists, per PEPS vertex, its output qubits joined by
//! commas (`-` for a vertex with physical dimension 1).

use super::{CompiledCircuit, CompiledPeps};
use crate::circuit::{circuit_from_text, circuit_to_text};
use crate::peps::{peps_from_json, peps_to_json};
use crate::text::{header_value, parse_f64, parse_usize};
use crate::{Error, Result};

fn scale_header(text: &str) -> Result<f64> {
    let v = header_value(text, "scale").ok_or_else(|| Error::parse("missing `# scale` header"))?;
    parse_f64(v)
}

fn outputs_header(text: &str) -> Result<&str> {
    header_value(text, "outputs").ok_or_else(|| Error::parse("missing `# outputs` header"))
}

pub fn compiled_peps_to_text(c: &CompiledPeps) -> String {
    let outputs: Vec<String> = c.output_sites.iter().map(|v| v.to_string()).collect();
    format!(
        "# scale {:?}\n# outputs {}\n{}\n",
        c.scale,
        outputs.join(" "),
        peps_to_json(&c.peps)
    )
}

pub fn compiled_peps_from_text(text: &str) -> Result<CompiledPeps> {
    let scale = scale_header(text)?;
    let output_sites = outputs_header(text)?
        .split_whitespace()
        .map(parse_usize)
        .collect::<Result<Vec<_>>>()?;
    let peps = peps_from_json(text)?;
    if let Some(&v) = output_sites.iter().find(|&&v| v >= peps.n_vertices()) {
        return Err(Error::invalid(format!("output site {v} is not a vertex")));
    }
    Ok(CompiledPeps {
        peps,
        scale,
        output_sites,
    })
}

pub fn compiled_circuit_to_text(c: &CompiledCircuit) -> String {
    let outputs: Vec<String> = c
        .output_qubits
        .iter()
        .map(|qs| {
            if qs.is_empty() {
                "-".to_string()
            } else {
                qs.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(",")
            }
        })
        .collect();
    format!(
        "# scale {:?}\n# outputs {}\n{}",
        c.scale,
        outputs.join(" "),
        circuit_to_text(&c.circuit)
    )
}

pub fn compiled_circuit_from_text(text: &str) -> Result<CompiledCircuit> {
    let scale = scale_header(text)?;
    let output_qubits = outputs_header(text)?
        .split_whitespace()
        .map(|group| {
            if group == "-" {
                Ok(Vec::new())
            } else {
                group.split(',').map(parse_usize).collect::<Result<Vec<_>>>()
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let circuit = circuit_from_text(text)?;
    if let Some(&q) = output_qubits.iter().flatten().find(|&&q| q >= circuit.n_qubits()) {
        return Err(Error::invalid(format!("output qubit {q} is out of range")));
    }
    Ok(CompiledCircuit {
        circuit,
        scale,
        output_qubits,
    })
}
