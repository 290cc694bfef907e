//! Circuit as tensor network: input vertices |0⟩, one vertex per gate holding
//! its matrix, output vertices with the identity (or |v⟩⟨v| when
//! postselected). Parallel wires between the same two vertices share one
//! edge whose index is row-major over the wires in qubit order.

use std::collections::BTreeMap;

use super::CompiledPeps;
use crate::circuit::PostselectedCircuit;
use crate::linalg::{from_row_major, C64, ONE, ZERO};
use crate::peps::{Edge, Peps, PepsGraph};
use crate::tensor::kernel::permute;
use crate::Result;

const OPEN: usize = usize::MAX;

/// A vertex tensor over per-wire legs, before grouping into edges.
struct WireTensor {
    phys: usize,
    /// (neighbour vertex, qubit) per leg
    legs: Vec<(usize, usize)>,
    /// row-major over [phys, legs…]
    data: Vec<C64>,
}

pub(super) fn compile(c: &PostselectedCircuit) -> Result<CompiledPeps> {
    let n = c.n_qubits();
    let g = c.gates().len();
    let out0 = n + g;
    let mut last: Vec<usize> = (0..n).collect();
    let mut tensors: Vec<WireTensor> = (0..n)
        .map(|q| WireTensor {
            phys: 1,
            legs: vec![(OPEN, q)],
            data: vec![ONE, ZERO],
        })
        .collect();
    // points the dangling out leg of `from` on wire `q` at vertex `to`
    let link = |tensors: &mut Vec<WireTensor>, from: usize, to: usize, q: usize| {
        let leg = tensors[from]
            .legs
            .iter_mut()
            .find(|l| **l == (OPEN, q))
            .expect("dangling out leg");
        leg.0 = to;
    };

    for (k, gate) in c.gates().iter().enumerate() {
        let v = n + k;
        let qs = gate.qubits();
        let m = gate.matrix();
        let mut legs = Vec::with_capacity(2 * qs.len());
        legs.extend(qs.iter().map(|&q| (OPEN, q)));
        for &q in &qs {
            link(&mut tensors, last[q], v, q);
            legs.push((last[q], q));
            last[q] = v;
        }
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for col in 0..m.ncols() {
                data.push(m[(r, col)]);
            }
        }
        tensors.push(WireTensor { phys: 1, legs, data });
    }
    let posts: BTreeMap<usize, u8> = c.postselections().iter().copied().collect();
    for q in 0..n {
        let v = out0 + q;
        link(&mut tensors, last[q], v, q);
        let data = match posts.get(&q) {
            Some(&b) => {
                let mut d = vec![ZERO; 4];
                d[3 * b as usize] = ONE;
                d
            }
            None => vec![ONE, ZERO, ZERO, ONE],
        };
        tensors.push(WireTensor {
            phys: 2,
            legs: vec![(last[q], q)],
            data,
        });
    }
    // group legs into edges and order them canonically: (neighbour, qubit)
    let mut edge_dims: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut projectors = Vec::with_capacity(tensors.len());
    let mut phys_dims = Vec::with_capacity(tensors.len());
    for (v, t) in tensors.iter().enumerate() {
        let mut order: Vec<usize> = (0..t.legs.len()).collect();
        order.sort_by_key(|&i| t.legs[i]);
        let mut dims = vec![t.phys];
        dims.extend(std::iter::repeat(2).take(t.legs.len()));
        let mut perm = vec![0];
        perm.extend(order.iter().map(|&i| i + 1));
        let data = permute(&t.data, &dims, &perm);
        let cols = data.len() / t.phys;
        projectors.push(from_row_major(t.phys, cols, &data));
        phys_dims.push(t.phys);
        for &(u, _) in &t.legs {
            if v < u {
                *edge_dims.entry((v, u)).or_insert(1) *= 2;
            }
        }
    }
    let edges = edge_dims
        .into_iter()
        .map(|((u, v), dim)| Edge { u, v, dim })
        .collect();
    let graph = PepsGraph::new(phys_dims, edges)?;
    let peps = Peps::new(graph, projectors)?;
    Ok(CompiledPeps {
        peps,
        scale: 1.0,
        output_sites: (out0..out0 + n).collect(),
    })
}
