//! Measurement patterns on a projected cluster state.
//!
//! Layout for n qubits: lattice rows 2r carry logical qubit r, odd rows are
//! spacers. Circuit time runs along columns in layers of four; layer k
//! occupies columns 4k..4k+3 and the final column holds the outputs.
//!
//! Projecting a wire site onto ⟨φ_θ| with |φ_θ⟩ = (|0⟩ + e^{iθ}|1⟩)/√2
//! teleports the logical state one column right while applying H·D(θ),
//! D(θ) = diag(1, e^{−iθ}), with amplitude 1/√2. Four columns with angles
//! θ1, θ2, θ3, 0 give D(θ3) H D(θ2) H D(θ1) ∝ Rz(−θ3) Rx(−θ2) Rz(−θ1), which
//! covers every single-qubit unitary.
//!
//! Spacer sites are projected onto ⟨0|, which deletes them. A spacer between
//! rows 2r and 2r+2 at column 4k projected onto ⟨φ_{π/2}| instead yields
//! exp(−iπ/4 Z⊗Z) ∝ CZ · D(−π/2) ⊗ D(−π/2) on the two logical qubits before
//! the layer's rotations; the D(−π/2) factors are absorbed into θ1.
//!
//! Every projected site contributes exactly 1/√2, so the PEPS state on the
//! outputs is 2^{−m/2} times the circuit output for m projected sites.

use std::f64::consts::{FRAC_PI_2, PI};

use super::CompiledPeps;
use crate::circuit::{Gate, PostselectedCircuit};
use crate::linalg::{c64, hadamard, CMatrix, C64, ONE, ZERO};
use crate::peps::{cluster_projector, Peps, PepsGraph};
use crate::{Error, Result};

/// Z-X-Z Euler angles (a, b, c) with U ∝ Rz(a) Rx(b) Rz(c).
pub fn zxz_angles(u: &CMatrix) -> (f64, f64, f64) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let v = u / det.sqrt();
    let theta = 2.0 * v[(1, 0)].norm().atan2(v[(0, 0)].norm());
    let sum = if v[(1, 1)].norm() > 1e-12 {
        2.0 * v[(1, 1)].arg()
    } else {
        0.0
    };
    let diff = if v[(1, 0)].norm() > 1e-12 {
        2.0 * v[(1, 0)].arg()
    } else {
        0.0
    };
    let (phi, lambda) = ((sum + diff) / 2.0, (sum - diff) / 2.0);
    // Rx(b) = Rz(−π/2) Ry(b) Rz(π/2)
    (phi + FRAC_PI_2, theta, lambda - FRAC_PI_2)
}

enum Op {
    Single(usize, CMatrix),
    /// CZ between adjacent logical rows r and r+1
    Bridge(usize),
}

fn lower(c: &PostselectedCircuit) -> Result<Vec<Op>> {
    let mut ops = Vec::new();
    let cz = |ops: &mut Vec<Op>, a: usize, b: usize| {
        let (lo, hi) = (a.min(b), a.max(b));
        // walk lo next to hi with SWAPs, apply, walk back
        let mut swaps = Vec::new();
        for r in lo..hi - 1 {
            swaps.push(r);
        }
        for &r in &swaps {
            swap(ops, r);
        }
        ops.push(Op::Bridge(hi - 1));
        for &r in swaps.iter().rev() {
            swap(ops, r);
        }
    };
    for g in c.gates() {
        match g {
            Gate::H(q) => ops.push(Op::Single(*q, hadamard())),
            Gate::X(q) => ops.push(Op::Single(*q, crate::linalg::pauli_x())),
            Gate::U1(q, m) => ops.push(Op::Single(*q, m.clone())),
            Gate::Cz(a, b) => cz(&mut ops, *a, *b),
            Gate::Cnot(ctl, t) => {
                ops.push(Op::Single(*t, hadamard()));
                cz(&mut ops, *ctl, *t);
                ops.push(Op::Single(*t, hadamard()));
            }
            other => {
                return Err(Error::invalid(format!(
                    "gate `{}` is not supported in mbqc mode (use H, X, CZ, CNOT, U1)",
                    other.name()
                )))
            }
        }
    }
    Ok(ops)
}

/// SWAP(r, r+1) = CNOT(r→r+1) CNOT(r+1→r) CNOT(r→r+1), CNOT = H_t CZ H_t.
fn swap(ops: &mut Vec<Op>, r: usize) {
    for t in [r + 1, r, r + 1] {
        ops.push(Op::Single(t, hadamard()));
        ops.push(Op::Bridge(r));
        ops.push(Op::Single(t, hadamard()));
    }
}

struct Layer {
    /// unitary per logical row, applied after the bridges
    units: Vec<CMatrix>,
    bridges: Vec<usize>,
}

fn schedule(n: usize, ops: Vec<Op>) -> Vec<Layer> {
    let blank = || Layer {
        units: vec![crate::linalg::identity(2); n],
        bridges: Vec::new(),
    };
    // layer 0 maps the cluster's |+⟩ inputs to |0⟩
    let mut first = blank();
    first.units = vec![hadamard(); n];
    let mut layers = vec![first];
    let mut row_layer = vec![0usize; n];
    for op in ops {
        match op {
            Op::Single(q, m) => {
                let l = &mut layers[row_layer[q]];
                l.units[q] = &m * &l.units[q];
            }
            Op::Bridge(r) => {
                let t = row_layer[r].max(row_layer[r + 1]) + 1;
                while layers.len() <= t {
                    layers.push(blank());
                }
                layers[t].bridges.push(r);
                row_layer[r] = t;
                row_layer[r + 1] = t;
            }
        }
    }
    layers
}

fn phi_bra(theta: f64) -> [C64; 2] {
    let a = std::f64::consts::FRAC_1_SQRT_2;
    [c64(a, 0.0), c64(theta.cos(), -theta.sin()) * a]
}

pub(super) fn compile(c: &PostselectedCircuit) -> Result<CompiledPeps> {
    let n = c.n_qubits();
    if n == 0 {
        return Err(Error::invalid("circuit has no qubits"));
    }
    let layers = schedule(n, lower(c)?);
    let width = 4 * layers.len() + 1;
    let height = 2 * n - 1;
    let graph = PepsGraph::grid(width, height, 2, 2)?;
    let site = |row: usize, col: usize| row * width + col;

    // bra per projected site; None keeps the physical leg
    let mut bras: Vec<Option<[C64; 2]>> = vec![Some([ONE, ZERO]); width * height];
    for (k, layer) in layers.iter().enumerate() {
        let col = 4 * k;
        let mut extra = vec![0.0; n];
        for &r in &layer.bridges {
            bras[site(2 * r + 1, col)] = Some(phi_bra(FRAC_PI_2));
            extra[r] += FRAC_PI_2;
            extra[r + 1] += FRAC_PI_2;
        }
        for q in 0..n {
            let (a, b, cc) = zxz_angles(&layer.units[q]);
            let thetas = [-cc + extra[q], -b, -a, 0.0];
            for (j, th) in thetas.iter().enumerate() {
                bras[site(2 * q, col + j)] = Some(phi_bra(th.rem_euclid(2.0 * PI)));
            }
        }
    }
    let last = width - 1;
    let posts: std::collections::BTreeMap<usize, u8> = c.postselections().iter().copied().collect();
    let mut output_sites = Vec::with_capacity(n);
    for q in 0..n {
        let v = site(2 * q, last);
        bras[v] = None;
        output_sites.push(v);
    }

    let mut phys_dims = Vec::with_capacity(width * height);
    let mut projectors = Vec::with_capacity(width * height);
    let mut projected = 0usize;
    for v in 0..width * height {
        let p = cluster_projector(&graph, v);
        match bras[v] {
            Some([b0, b1]) => {
                projected += 1;
                let row = p.row(0) * b0 + p.row(1) * b1;
                projectors.push(CMatrix::from_rows(&[row]));
                phys_dims.push(1);
            }
            None => {
                let q = output_sites.iter().position(|&s| s == v).expect("output");
                let p = match posts.get(&q) {
                    Some(&b) => {
                        let mut kept = CMatrix::zeros(2, p.ncols());
                        kept.set_row(b as usize, &p.row(b as usize));
                        kept
                    }
                    None => p,
                };
                projectors.push(p);
                phys_dims.push(2);
            }
        }
    }
    let graph = PepsGraph::new(phys_dims, graph.edges().to_vec())?;
    let peps = Peps::new(graph, projectors)?;
    Ok(CompiledPeps {
        peps,
        scale: 0.5f64.powf(projected as f64 / 2.0),
        output_sites,
    })
}
