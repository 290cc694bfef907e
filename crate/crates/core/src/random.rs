//! Seeded instance generators shared by tests, benches, the verification
//! suite and the CLI. All generators are deterministic in the seed.

use rand::seq::SliceRandom;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{simulate, Cnf, Gate, PostselectedCircuit};
use crate::linalg::{c64, CMatrix, C64};
use crate::peps::{Peps, PepsGraph};
use crate::tensor::{Bond, LegRef, Tensor, TensorId, TensorNetwork};

pub struct Rng(pub ChaCha8Rng);

impl Rng {
    pub fn seed(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn uniform(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.0.gen_range(0..n)
    }

    pub fn coin(&mut self) -> bool {
        self.0.gen::<bool>()
    }

    /// Standard normal sample (Box–Muller).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Complex number with independent standard normal parts.
    pub fn complex(&mut self) -> C64 {
        c64(self.normal(), self.normal())
    }
}

pub fn random_tensor(rng: &mut Rng, id: TensorId, shape: &[usize]) -> Tensor {
    let n: usize = shape.iter().product();
    let data = (0..n).map(|_| rng.complex()).collect();
    Tensor::new(id, shape.to_vec(), data).expect("random tensor is valid")
}

/// Builds a closed network from an edge list `(u, v, dim)` over `n` tensors.
/// Legs are numbered per tensor in edge order.
pub fn network_from_edges(rng: &mut Rng, n: usize, edges: &[(usize, usize, usize)]) -> TensorNetwork {
    let mut shapes = vec![Vec::new(); n];
    let mut bonds = Vec::new();
    for &(u, v, d) in edges {
        let lu = shapes[u].len();
        shapes[u].push(d);
        let lv = shapes[v].len();
        shapes[v].push(d);
        bonds.push(Bond::new(LegRef::new(u, lu), LegRef::new(v, lv)));
    }
    let tensors = shapes
        .iter()
        .enumerate()
        .map(|(i, s)| random_tensor(rng, TensorId(i), s))
        .collect();
    TensorNetwork::new(tensors, bonds, vec![]).expect("edge list network is valid")
}

/// Closed `w`×`h` square-lattice network with uniform bond dimension.
pub fn random_closed_grid(rng: &mut Rng, w: usize, h: usize, dim: usize) -> TensorNetwork {
    let mut edges = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                edges.push((v, v + 1, dim));
            }
            if y + 1 < h {
                edges.push((v, v + w, dim));
            }
        }
    }
    network_from_edges(rng, w * h, &edges)
}

/// Connected closed network on `n` tensors: a random spanning tree plus a
/// few extra bonds (possibly parallel, possibly trace edges), each of
/// dimension in `1..=max_dim`. Total assignments stay below 2^16.
pub fn random_connected_network(rng: &mut Rng, n: usize, max_dim: usize) -> TensorNetwork {
    let mut edges = Vec::new();
    let mut budget: f64 = 16.0;
    let dim = |rng: &mut Rng, budget: &mut f64| {
        let d = 1 + rng.below(max_dim.max(1));
        let d = if (d as f64).log2() > *budget { 1 } else { d };
        *budget -= (d as f64).log2();
        d
    };
    for v in 1..n {
        let u = rng.below(v);
        let d = dim(rng, &mut budget).max(if budget > 1.0 { 2 } else { 1 });
        edges.push((u, v, d));
    }
    let extra = if n == 1 { 1 } else { rng.below(n.min(4)) };
    for _ in 0..extra {
        let u = rng.below(n);
        let v = rng.below(n);
        let d = dim(rng, &mut budget);
        edges.push((u, v, d));
    }
    if edges.is_empty() {
        edges.push((0, 0, dim(rng, &mut budget)));
    }
    network_from_edges(rng, n, &edges)
}

pub fn random_matrix(rng: &mut Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| rng.complex())
}

/// Hermitian matrix (G + G†)/2 with Gaussian G.
pub fn random_hermitian(rng: &mut Rng, dim: usize) -> CMatrix {
    let g = random_matrix(rng, dim, dim);
    (&g + g.adjoint()) * c64(0.5, 0.0)
}

/// Haar-random unitary from the QR decomposition of a Gaussian matrix with
/// the phases of R's diagonal divided out.
pub fn random_unitary(rng: &mut Rng, dim: usize) -> CMatrix {
    let qr = random_matrix(rng, dim, dim).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// PEPS on `graph` with Gaussian projectors.
pub fn random_peps(rng: &mut Rng, graph: PepsGraph) -> Peps {
    let projectors = (0..graph.n_vertices())
        .map(|v| random_matrix(rng, graph.phys_dim(v), graph.virtual_dim(v)))
        .collect();
    Peps::new(graph, projectors).expect("random PEPS is valid")
}

pub fn random_grid_peps(rng: &mut Rng, w: usize, h: usize, bond_dim: usize, phys_dim: usize) -> Peps {
    let graph = PepsGraph::grid(w, h, bond_dim, phys_dim).expect("grid graph");
    random_peps(rng, graph)
}

fn distinct(rng: &mut Rng, n: usize, k: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(&mut rng.0);
    all.truncate(k);
    all
}

fn random_gate(rng: &mut Rng, n: usize, kinds: &[&str]) -> Gate {
    loop {
        let kind = kinds[rng.below(kinds.len())];
        let arity = match kind {
            "h" | "x" | "u1" => 1,
            "cnot" | "cz" | "u2" => 2,
            _ => 3,
        };
        if arity > n {
            continue;
        }
        let q = distinct(rng, n, arity);
        return match kind {
            "h" => Gate::H(q[0]),
            "x" => Gate::X(q[0]),
            "u1" => Gate::U1(q[0], random_unitary(rng, 2)),
            "cnot" => Gate::Cnot(q[0], q[1]),
            "cz" => Gate::Cz(q[0], q[1]),
            "u2" => Gate::U2(q[0], q[1], random_unitary(rng, 4)),
            _ => Gate::Toffoli(q[0], q[1], q[2]),
        };
    }
}

fn random_posts(rng: &mut Rng, n: usize, posts: usize) -> Vec<(usize, u8)> {
    distinct(rng, n, posts.min(n))
        .into_iter()
        .map(|q| (q, rng.coin() as u8))
        .collect()
}

/// Circuit over the full gate set with `posts` postselections on distinct
/// qubits (not necessarily valid).
pub fn random_circuit(rng: &mut Rng, n: usize, gates: usize, posts: usize) -> PostselectedCircuit {
    let kinds = ["h", "x", "u1", "cnot", "cz", "u2", "toffoli"];
    let gates = (0..gates).map(|_| random_gate(rng, n, &kinds)).collect();
    let posts = random_posts(rng, n, posts);
    PostselectedCircuit::from_parts(n, gates, posts).expect("random circuit is valid")
}

/// Circuit over {H, CZ, CNOT, U1}.
pub fn random_mbqc_circuit(rng: &mut Rng, n: usize, gates: usize, posts: usize) -> PostselectedCircuit {
    let kinds = ["h", "u1", "cnot", "cz"];
    let gates = (0..gates).map(|_| random_gate(rng, n, &kinds)).collect();
    let posts = random_posts(rng, n, posts);
    PostselectedCircuit::from_parts(n, gates, posts).expect("random circuit is valid")
}

/// Toffoli–Hadamard circuit with at most `max_h` Hadamards.
pub fn random_th_circuit(
    rng: &mut Rng,
    n: usize,
    gates: usize,
    max_h: usize,
    posts: usize,
) -> PostselectedCircuit {
    let kinds = ["h", "x", "cnot", "toffoli"];
    let mut out = Vec::new();
    let mut h = 0;
    while out.len() < gates {
        let g = random_gate(rng, n, &kinds);
        if matches!(g, Gate::H(_)) {
            if h == max_h {
                continue;
            }
            h += 1;
        }
        out.push(g);
    }
    let posts = random_posts(rng, n, posts);
    PostselectedCircuit::from_parts(n, out, posts).expect("random circuit is valid")
}

/// Random circuit from `make` whose postselections all have conditional
/// probability at least `min_p`; retries with fresh draws until one does.
pub fn valid_postselected<F>(rng: &mut Rng, min_p: f64, mut make: F) -> PostselectedCircuit
where
    F: FnMut(&mut Rng) -> PostselectedCircuit,
{
    loop {
        let c = make(rng);
        if let Ok((_, p)) = simulate(&c) {
            if p >= min_p {
                return c;
            }
        }
    }
}

/// `clauses` clauses of exactly `width` distinct variables with random signs.
pub fn random_cnf(rng: &mut Rng, n_vars: usize, clauses: usize, width: usize) -> Cnf {
    let clauses = (0..clauses)
        .map(|_| {
            distinct(rng, n_vars, width.min(n_vars))
                .into_iter()
                .map(|v| if rng.coin() { v as i64 + 1 } else { -(v as i64 + 1) })
                .collect()
        })
        .collect();
    Cnf::new(n_vars, clauses).expect("random CNF is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_seed_deterministic() {
        let a = random_connected_network(&mut Rng::seed(3), 6, 3);
        let b = random_connected_network(&mut Rng::seed(3), 6, 3);
        assert_eq!(a, b);
        assert!(a.is_connected() && a.is_closed());
        assert!(a.assignment_count() <= 1 << 16);
    }
}
