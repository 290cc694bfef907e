//! PEPS JSON document:
//!
//! ```text
//! {"graph": {"vertices": [0, 1], "edges": [[0, 1, 2]], "phys_dims": [2, 2]},
//!  "projectors": [[[1.0, 0.0], ...], ...]}
//! ```
//!
//! Projector `v` is its d × ∏D matrix flattened row-major, columns in the
//! canonical leg order. Leading `#` lines (e.g. `# scale 2.0`) are ignored.

use serde::{Deserialize, Serialize};

use super::{Edge, Peps, PepsGraph};
use crate::linalg::{c64, from_row_major, to_row_major};
use crate::text::strip_comment_header;
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: Vec<usize>,
    edges: Vec<[usize; 3]>,
    phys_dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PepsDoc {
    graph: GraphDoc,
    projectors: Vec<Vec<[f64; 2]>>,
}

pub fn peps_to_json(p: &Peps) -> String {
    let g = p.graph();
    let doc = PepsDoc {
        graph: GraphDoc {
            vertices: (0..g.n_vertices()).collect(),
            edges: g.edges().iter().map(|e| [e.u, e.v, e.dim]).collect(),
            phys_dims: g.phys_dims().to_vec(),
        },
        projectors: p
            .projectors()
            .iter()
            .map(|m| to_row_major(m).iter().map(|z| [z.re, z.im]).collect())
            .collect(),
    };
    serde_json::to_string(&doc).expect("PEPS serializes")
}

pub fn peps_from_json(text: &str) -> Result<Peps> {
    let doc: PepsDoc = serde_json::from_str(strip_comment_header(text))
        .map_err(|e| Error::parse(format!("PEPS document: {e}")))?;
    if doc.graph.vertices != (0..doc.graph.phys_dims.len()).collect::<Vec<_>>() {
        return Err(Error::invalid(
            "vertices must be listed as 0..n in order, matching phys_dims",
        ));
    }
    let edges = doc
        .graph
        .edges
        .iter()
        .map(|&[u, v, dim]| Edge { u, v, dim })
        .collect();
    let graph = PepsGraph::new(doc.graph.phys_dims, edges)?;
    if doc.projectors.len() != graph.n_vertices() {
        return Err(Error::invalid(format!(
            "{} projectors for {} vertices",
            doc.projectors.len(),
            graph.n_vertices()
        )));
    }
    let mut projectors = Vec::with_capacity(graph.n_vertices());
    for (v, flat) in doc.projectors.iter().enumerate() {
        let (rows, cols) = (graph.phys_dim(v), graph.virtual_dim(v));
        if flat.len() != rows * cols {
            return Err(Error::invalid(format!(
                "projector {v} has {} entries, expected {}",
                flat.len(),
                rows * cols
            )));
        }
        let data: Vec<_> = flat.iter().map(|&[re, im]| c64(re, im)).collect();
        projectors.push(from_row_major(rows, cols, &data));
    }
    Peps::new(graph, projectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_grid_peps, Rng};

    #[test]
    fn round_trip() {
        let p = random_grid_peps(&mut Rng::seed(1), 2, 2, 2, 2);
        let text = peps_to_json(&p);
        let back = peps_from_json(&format!("# scale 3\n{text}")).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(peps_from_json("[]"), Err(Error::Parse(_))));
        let bad_len = r#"{"graph":{"vertices":[0],"edges":[],"phys_dims":[2]},"projectors":[[[1,0]]]}"#;
        assert!(matches!(peps_from_json(bad_len), Err(Error::Invalid(_))));
        let ok = r#"{"graph":{"vertices":[0],"edges":[],"phys_dims":[2]},"projectors":[[[1,0],[0,0]]]}"#;
        assert!(peps_from_json(ok).is_ok());
    }
}
