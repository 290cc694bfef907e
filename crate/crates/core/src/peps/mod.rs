//! Projected Entangled Pair States on arbitrary graphs.
//!
//! Every edge carries the unnormalized pair Σᵢ|ii⟩ of dimension D; vertex v
//! applies the map P[v] (d(v) rows, ∏ D columns over its virtual legs).
//! Virtual legs at a vertex are ordered by (neighbour id, edge index) and the
//! column index of P[v] is row-major over that order.

mod eval;
mod format;

pub use eval::{
    nev, nev_with, norm_squared, norm_squared_double_layer, norm_squared_with, peps_to_network,
    reduced_density_matrix, state_vector, uev, uev_double_layer, uev_via_norm, uev_with, KET_FIRST_LIMIT,
};
pub use format::{peps_from_json, peps_to_json};

use crate::linalg::{c64, from_row_major, is_hermitian, CMatrix, C64, ONE, ZERO};
use crate::{Error, Result};

/// Largest vertex degree accepted by [`PepsGraph::new`].
pub const MAX_DEGREE: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub dim: usize,
}

/// Undirected simple graph on vertices `0..n` with bond and physical
/// dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct PepsGraph {
    edges: Vec<Edge>,
    phys_dims: Vec<usize>,
    /// canonical incident edge list per vertex
    legs: Vec<Vec<usize>>,
}

impl PepsGraph {
    pub fn new(phys_dims: Vec<usize>, edges: Vec<Edge>) -> Result<Self> {
        let n = phys_dims.len();
        if n == 0 {
            return Err(Error::invalid("PEPS graph needs at least one vertex"));
        }
        if let Some(v) = phys_dims.iter().position(|&d| d == 0) {
            return Err(Error::invalid(format!("vertex {v} has physical dimension 0")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) refers to a missing vertex",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::invalid(format!("self-loop at vertex {}", e.u)));
            }
            if e.dim == 0 {
                return Err(Error::invalid(format!("edge ({}, {}) has dimension 0", e.u, e.v)));
            }
            if !seen.insert((e.u.min(e.v), e.u.max(e.v))) {
                return Err(Error::invalid(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
        }
        let mut legs = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            legs[e.u].push(k);
            legs[e.v].push(k);
        }
        for (v, l) in legs.iter_mut().enumerate() {
            if l.len() > MAX_DEGREE {
                return Err(Error::invalid(format!(
                    "vertex {v} has degree {} above the cap {MAX_DEGREE}",
                    l.len()
                )));
            }
            l.sort_by_key(|&k| (other_end(&edges[k], v), k));
        }
        Ok(Self {
            edges,
            phys_dims,
            legs,
        })
    }

    /// `w`×`h` square lattice, vertex `y*w + x`, uniform dimensions.
    pub fn grid(w: usize, h: usize, bond_dim: usize, phys_dim: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let v = y * w + x;
                if x + 1 < w {
                    edges.push(Edge {
                        u: v,
                        v: v + 1,
                        dim: bond_dim,
                    });
                }
                if y + 1 < h {
                    edges.push(Edge {
                        u: v,
                        v: v + w,
                        dim: bond_dim,
                    });
                }
            }
        }
        Self::new(vec![phys_dim; w * h], edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.phys_dims.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn phys_dim(&self, v: usize) -> usize {
        self.phys_dims[v]
    }

    pub fn phys_dims(&self) -> &[usize] {
        &self.phys_dims
    }

    /// Incident edge indices of `v` in canonical leg order.
    pub fn legs(&self, v: usize) -> &[usize] {
        &self.legs[v]
    }

    pub fn neighbour(&self, v: usize, edge: usize) -> usize {
        other_end(&self.edges[edge], v)
    }

    pub fn virtual_dims(&self, v: usize) -> Vec<usize> {
        self.legs[v].iter().map(|&k| self.edges[k].dim).collect()
    }

    pub fn virtual_dim(&self, v: usize) -> usize {
        self.virtual_dims(v).iter().product()
    }

    /// Position of `edge` among the legs of `v`.
    pub fn leg_position(&self, v: usize, edge: usize) -> Option<usize> {
        self.legs[v].iter().position(|&k| k == edge)
    }
}

fn other_end(e: &Edge, v: usize) -> usize {
    if e.u == v {
        e.v
    } else {
        e.u
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Peps {
    graph: PepsGraph,
    projectors: Vec<CMatrix>,
}

impl Peps {
    pub fn new(graph: PepsGraph, projectors: Vec<CMatrix>) -> Result<Self> {
        if projectors.len() != graph.n_vertices() {
            return Err(Error::invalid(format!(
                "{} projectors for {} vertices",
                projectors.len(),
                graph.n_vertices()
            )));
        }
        for (v, p) in projectors.iter().enumerate() {
            let want = (graph.phys_dim(v), graph.virtual_dim(v));
            if p.shape() != want {
                return Err(Error::invalid(format!(
                    "projector {v} has shape {:?}, expected {want:?}",
                    p.shape()
                )));
            }
            if p.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::invalid(format!("projector {v} has a non-finite entry")));
            }
        }
        Ok(Self { graph, projectors })
    }

    pub fn graph(&self) -> &PepsGraph {
        &self.graph
    }

    pub fn projector(&self, v: usize) -> &CMatrix {
        &self.projectors[v]
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn n_vertices(&self) -> usize {
        self.graph.n_vertices()
    }

    pub fn with_projector(&self, v: usize, p: CMatrix) -> Result<Self> {
        let mut projectors = self.projectors.clone();
        projectors[v] = p;
        Self::new(self.graph.clone(), projectors)
    }

    /// ∏_v ‖P[v]‖_F² / ∏_e D_e, the mean of ⟨ψ|ψ⟩ over projectors with
    /// i.i.d. entries of the same Frobenius norms. Exactly 1 for PEPS built
    /// from unitary circuits. Used as the reference scale for zero tests.
    pub fn norm_scale(&self) -> f64 {
        let log: f64 = self.projectors.iter().map(|p| p.norm_squared().ln()).sum::<f64>()
            - self
                .graph
                .edges()
                .iter()
                .map(|e| (e.dim as f64).ln())
                .sum::<f64>();
        log.exp()
    }
}

/// Fixes the physical index of `v` to `outcome`, leaving a vertex of
/// physical dimension 1; the new state is the slice ⟨outcome|_v |ψ⟩.
pub fn project_physical(p: &Peps, v: usize, outcome: usize) -> Result<Peps> {
    if v >= p.n_vertices() || outcome >= p.graph().phys_dim(v) {
        return Err(Error::invalid(format!(
            "cannot fix vertex {v} to outcome {outcome}"
        )));
    }
    let mut dims = p.graph().phys_dims().to_vec();
    dims[v] = 1;
    let graph = PepsGraph::new(dims, p.graph().edges().to_vec())?;
    let mut projectors = p.projectors().to_vec();
    projectors[v] = CMatrix::from_rows(&[p.projector(v).row(outcome).into_owned()]);
    Peps::new(graph, projectors)
}

/// Multiplies the projector at `v` by `c`.
pub fn rescale_projector(p: &Peps, v: usize, c: C64) -> Result<Peps> {
    if c == ZERO {
        return Err(Error::invalid("rescale factor must be nonzero"));
    }
    if v >= p.n_vertices() {
        return Err(Error::invalid(format!("no vertex {v}")));
    }
    p.with_projector(v, p.projector(v) * c)
}

/// Hermitian operator on the physical spaces of `support`, in that order.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    support: Vec<usize>,
    matrix: CMatrix,
}

impl Observable {
    pub fn new(support: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let mut sorted = support.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != support.len() || support.is_empty() {
            return Err(Error::invalid("observable support must be nonempty and distinct"));
        }
        if !matrix.is_square() || !is_hermitian(&matrix, 1e-12) {
            return Err(Error::invalid("observable matrix must be Hermitian"));
        }
        Ok(Self { support, matrix })
    }

    pub fn single(site: usize, matrix: CMatrix) -> Result<Self> {
        Self::new(vec![site], matrix)
    }

    /// Parses `name@site` with name one of `sz`, `sx`, `sy`, `id`, `p0`, `p1`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (name, site) = spec
            .split_once('@')
            .ok_or_else(|| Error::parse(format!("observable `{spec}`: expected name@vertex")))?;
        let site = crate::text::parse_usize(site)?;
        let m = match name {
            "sz" => crate::linalg::pauli_z(),
            "sx" => crate::linalg::pauli_x(),
            "sy" => crate::linalg::pauli_y(),
            "id" => crate::linalg::identity(2),
            "p0" => from_row_major(2, 2, &[ONE, ZERO, ZERO, ZERO]),
            "p1" => from_row_major(2, 2, &[ZERO, ZERO, ZERO, ONE]),
            _ => return Err(Error::parse(format!("unknown observable `{name}`"))),
        };
        Self::single(site, m)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    fn check_against(&self, p: &Peps) -> Result<()> {
        let mut dim = 1;
        for &v in &self.support {
            if v >= p.n_vertices() {
                return Err(Error::invalid(format!("observable acts on missing vertex {v}")));
            }
            dim *= p.graph().phys_dim(v);
        }
        if dim != self.matrix.nrows() {
            return Err(Error::invalid(format!(
                "observable dimension {} does not match support dimension {dim}",
                self.matrix.nrows()
            )));
        }
        Ok(())
    }
}

/// Cluster state ∏_{edges} CZ |+⟩^{⊗wh} on a `w`×`h` lattice with D = d = 2.
///
/// P[v][s; k…] = 2^{-1/2} ∏_e f_e(s, k_e) where f_e = δ(s, k_e) when v is the
/// smaller endpoint of e and (−1)^{s·k_e} otherwise, so each bond contracts
/// to the CZ phase (−1)^{s_u s_v}.
pub fn cluster_peps(w: usize, h: usize) -> Result<Peps> {
    if w == 0 || h == 0 {
        return Err(Error::invalid("cluster lattice needs w, h ≥ 1"));
    }
    let graph = PepsGraph::grid(w, h, 2, 2)?;
    let projectors = (0..graph.n_vertices())
        .map(|v| cluster_projector(&graph, v))
        .collect();
    Peps::new(graph, projectors)
}

pub(crate) fn cluster_projector(graph: &PepsGraph, v: usize) -> CMatrix {
    let legs = graph.legs(v);
    let cols = 1usize << legs.len();
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(2, cols);
    for s in 0..2usize {
        'col: for col in 0..cols {
            let mut sign = 1.0;
            for (pos, &e) in legs.iter().enumerate() {
                let k = (col >> (legs.len() - 1 - pos)) & 1;
                if graph.neighbour(v, e) > v {
                    if k != s {
                        continue 'col;
                    }
                } else if s & k == 1 {
                    sign = -sign;
                }
            }
            m[(s, col)] = c64(sign * amp, 0.0);
        }
    }
    m
}
