//! PEPS → postselected circuit.

use crate::circuit::{Gate, PostselectedCircuit};
use crate::linalg::{c64, svd, CMatrix, ZERO};
use crate::peps::{nev, Observable, Peps};
use crate::{Error, Result};

/// Largest matrix side accepted by [`dilate`].
pub const MAX_DILATION_SIDE: usize = 1 << 12;

/// Unitary `U` on ancilla ⊗ system (ancilla most significant) with
/// ⟨0_anc|U|0_anc⟩ = P̃ = P̃₀/s, where P̃₀ is `p` zero-padded to a square and
/// s its largest singular value.
pub fn dilate(p: &CMatrix) -> Result<(CMatrix, f64)> {
    let n = p.nrows().max(p.ncols());
    if n > MAX_DILATION_SIDE {
        return Err(Error::TooLarge {
            entries: (n as u128) * (n as u128),
            cap: MAX_DILATION_SIDE * MAX_DILATION_SIDE,
        });
    }
    if n == 0 || p.iter().all(|z| *z == ZERO) {
        return Err(Error::invalid("cannot dilate a zero matrix"));
    }
    let mut sq = CMatrix::zeros(n, n);
    sq.view_mut((0, 0), (p.nrows(), p.ncols())).copy_from(p);
    // P̃ = W Σ V†, so (1 − P̃P̃†)^{1/2} = W C W† and (1 − P̃†P̃)^{1/2} = V C V†
    let (w, sigma, vh) = svd(&sq);
    let s = sigma[0];
    let v = vh.adjoint();
    let mut sig = CMatrix::zeros(n, n);
    let mut cos = CMatrix::zeros(n, n);
    for (k, &x) in sigma.iter().enumerate() {
        let t = (x / s).min(1.0);
        sig[(k, k)] = c64(t, 0.0);
        cos[(k, k)] = c64((1.0 - t * t).max(0.0).sqrt(), 0.0);
    }
    let top_left = &w * &sig * &vh;
    let mut u = CMatrix::zeros(2 * n, 2 * n);
    u.view_mut((0, 0), (n, n)).copy_from(&top_left);
    u.view_mut((0, n), (n, n)).copy_from(&(&w * &cos * w.adjoint()));
    u.view_mut((n, 0), (n, n)).copy_from(&(&v * &cos * &vh));
    u.view_mut((n, n), (n, n)).copy_from(&(-top_left.adjoint()));
    Ok((u, s))
}

/// A circuit whose normalized output is the PEPS state up to global phase,
/// with ⟨ψ|ψ⟩ = scale² · p_success.
#[derive(Clone, Debug)]
pub struct CompiledCircuit {
    pub circuit: PostselectedCircuit,
    pub scale: f64,
    /// qubits carrying each vertex's physical index, most significant first
    pub output_qubits: Vec<Vec<usize>>,
}

impl CompiledCircuit {
    /// The qubit holding the single gathered postselection.
    pub fn flag(&self) -> usize {
        self.circuit.postselections()[0].0
    }

    /// Output qubits of all vertices in vertex order.
    pub fn all_output_qubits(&self) -> Vec<usize> {
        self.output_qubits.iter().flatten().copied().collect()
    }
}

fn log2_exact(x: usize, what: &str) -> Result<usize> {
    if x.is_power_of_two() {
        Ok(x.trailing_zeros() as usize)
    } else {
        Err(Error::invalid(format!("{what} {x} is not a power of two")))
    }
}

pub fn peps_to_circuit(p: &Peps) -> Result<CompiledCircuit> {
    let g = p.graph();
    let n = g.n_vertices();
    let mut c = PostselectedCircuit::new(0);
    let mut scale = 1.0;

    // qubits per (edge, side), side 0 belongs to edge.u
    let mut edge_qubits = Vec::with_capacity(g.edges().len());
    for e in g.edges() {
        let b = log2_exact(e.dim, "bond dimension")?;
        let left: Vec<usize> = c.add_qubits(b).collect();
        let right: Vec<usize> = c.add_qubits(b).collect();
        for (&l, &r) in left.iter().zip(&right) {
            c.push(Gate::H(l))?;
            c.push(Gate::Cnot(l, r))?;
        }
        scale *= (e.dim as f64).sqrt();
        edge_qubits.push([left, right]);
    }

    let mut output_qubits = Vec::with_capacity(n);
    let mut posts = Vec::with_capacity(n);
    for v in 0..n {
        let d = g.phys_dim(v);
        log2_exact(d, "physical dimension")?;
        let (u, s) = dilate(p.projector(v))?;
        scale *= s;
        let side = u.nrows() / 2;
        let width = side.trailing_zeros() as usize;
        let mut virt = Vec::new();
        for &e in g.legs(v) {
            let side_idx = usize::from(g.edges()[e].u != v);
            virt.extend_from_slice(&edge_qubits[e][side_idx]);
        }
        // pads sit above the virtual qubits so column index = virtual index
        let pads: Vec<usize> = c.add_qubits(width - virt.len()).collect();
        let anc = c.add_qubits(1).start;
        let mut reg = pads;
        reg.extend(virt);
        let mut support = vec![anc];
        support.extend(&reg);
        c.push(Gate::Un(support, u))?;
        posts.push(anc);
        let out_bits = d.trailing_zeros() as usize;
        output_qubits.push(reg[reg.len() - out_bits..].to_vec());
    }
    for anc in posts {
        c.postselect(anc, 0)?;
    }
    Ok(CompiledCircuit {
        circuit: gather_postselections(&c)?,
        scale,
        output_qubits,
    })
}

/// Replaces all postselections by one on a fresh qubit holding their OR
/// (after flipping outcome-1 events). Intermediate AND results live on
/// scratch qubits that are returned to |0⟩.
pub fn gather_postselections(c: &PostselectedCircuit) -> Result<PostselectedCircuit> {
    let posts = c.postselections().to_vec();
    if posts.is_empty() {
        return Ok(c.clone());
    }
    let mut out = c.without_postselections();
    // literal i is 1 exactly when event i holds
    let mut flips = Vec::new();
    for &(q, v) in &posts {
        if v == 0 {
            flips.push(Gate::X(q));
        }
    }
    for g in &flips {
        out.push(g.clone())?;
    }
    let mut compute = Vec::new();
    let mut level: Vec<usize> = posts.iter().map(|&(q, _)| q).collect();
    while level.len() > 2 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        for pair in level.chunks(2) {
            match *pair {
                [a, b] => {
                    let t = out.add_qubits(1).start;
                    compute.push(Gate::Toffoli(a, b, t));
                    next.push(t);
                }
                [a] => next.push(a),
                _ => unreachable!(),
            }
        }
        level = next;
    }
    let f = out.add_qubits(1).start;
    for g in &compute {
        out.push(g.clone())?;
    }
    // f = AND of all events, flipped: f = 0 iff every event holds
    match *level.as_slice() {
        [a] => out.push(Gate::Cnot(a, f))?,
        [a, b] => out.push(Gate::Toffoli(a, b, f))?,
        _ => unreachable!(),
    };
    out.push(Gate::X(f))?;
    for g in compute.iter().rev() {
        out.push(g.clone())?;
    }
    for g in flips.iter().rev() {
        out.push(g.clone())?;
    }
    out.postselect(f, 0)?;
    Ok(out)
}

/// ⟨ψ|ψ⟩ of `p` from the compiled circuit: γ² times the probability that
/// the gathered flag reads 0, evaluated as a normalized expectation value of
/// diag(1, 0) on the spacetime PEPS of the unpostselected circuit.
pub fn norm_via_nev(p: &Peps) -> Result<f64> {
    let compiled = peps_to_circuit(p)?;
    let flag = compiled.flag();
    let free = compiled.circuit.without_postselections();
    let net = super::circuit_to_peps(&free, super::Mode::Spacetime)?;
    let obs = Observable::single(
        net.output_sites[flag],
        crate::linalg::from_row_major(2, 2, &[c64(1.0, 0.0), ZERO, ZERO, ZERO]),
    )?;
    Ok(compiled.scale.powi(2) * nev(&net.peps, &obs)?)
}
