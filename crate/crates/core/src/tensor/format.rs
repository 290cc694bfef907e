//! JSON document format for tensor networks.
//!
//! ```text
//! {"tensors": [{"id": 0, "shape": [2, 2], "data": [[1.0, 0.0], ...]}],
//!  "bonds": [[0, 0, 0, 1]],
//!  "open": [[1, 0]]}
//! ```
//!
//! Leading `#` lines are ignored on input. Floats are printed in shortest
//! round-trip form, so writing and re-reading a network is bit-exact.

use serde::{Deserialize, Serialize};

use super::network::{Bond, LegRef, Tensor, TensorId, TensorNetwork};
use crate::linalg::c64;
use crate::text::strip_comment_header;
use crate::{Error, Result};

#[derive(Serialize, Deserialize)]
struct TensorDoc {
    id: usize,
    shape: Vec<usize>,
    data: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkDoc {
    tensors: Vec<TensorDoc>,
    #[serde(default)]
    bonds: Vec<[usize; 4]>,
    #[serde(default)]
    open: Vec<[usize; 2]>,
}

pub fn network_to_json(net: &TensorNetwork) -> String {
    let doc = NetworkDoc {
        tensors: net
            .tensors()
            .map(|t| TensorDoc {
                id: t.id.0,
                shape: t.shape.clone(),
                data: t.data.iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect(),
        bonds: net
            .bonds()
            .iter()
            .map(|b| [b.a.tensor.0, b.a.leg, b.b.tensor.0, b.b.leg])
            .collect(),
        open: net.open_legs().iter().map(|r| [r.tensor.0, r.leg]).collect(),
    };
    serde_json::to_string(&doc).expect("network serializes")
}

pub fn network_from_json(text: &str) -> Result<TensorNetwork> {
    let doc: NetworkDoc = serde_json::from_str(strip_comment_header(text))
        .map_err(|e| Error::parse(format!("network document: {e}")))?;
    let tensors = doc
        .tensors
        .into_iter()
        .map(|t| {
            let data = t.data.into_iter().map(|[re, im]| c64(re, im)).collect();
            Tensor::new(TensorId(t.id), t.shape, data)
        })
        .collect::<Result<Vec<_>>>()?;
    let bonds = doc
        .bonds
        .into_iter()
        .map(|[a, la, b, lb]| Bond::new(LegRef::new(a, la), LegRef::new(b, lb)))
        .collect();
    let open = doc.open.into_iter().map(|[t, l]| LegRef::new(t, l)).collect();
    TensorNetwork::new(tensors, bonds, open)
}
