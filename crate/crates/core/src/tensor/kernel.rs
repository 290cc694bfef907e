//! Labeled dense tensors and the pairwise contraction kernel.
//!
//! A label names an index; a label shared by two tensors is summed when they
//! are merged. Output entries are each accumulated sequentially in a fixed
//! order, so parallel row scheduling never changes the floating result.

use crate::linalg::{C64, ZERO};
use crate::par::{self, Execution};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) struct Labeled {
    pub labels: Vec<usize>,
    pub dims: Vec<usize>,
    pub data: Vec<C64>,
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Reorders axes: output axis `i` is input axis `perm[i]`.
pub(crate) fn permute(data: &[C64], dims: &[usize], perm: &[usize]) -> Vec<C64> {
    debug_assert_eq!(dims.len(), perm.len());
    if perm.iter().enumerate().all(|(i, &p)| i == p) {
        return data.to_vec();
    }
    let in_strides = strides(dims);
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let step: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
    let mut out = Vec::with_capacity(data.len());
    let mut idx = vec![0usize; out_dims.len()];
    let mut offset = 0usize;
    for _ in 0..data.len() {
        out.push(data[offset]);
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            offset += step[k];
            if idx[k] < out_dims[k] {
                break;
            }
            offset -= step[k] * out_dims[k];
            idx[k] = 0;
        }
    }
    out
}

impl Labeled {
    pub fn permuted(&self, perm: &[usize]) -> Labeled {
        Labeled {
            labels: perm.iter().map(|&p| self.labels[p]).collect(),
            dims: perm.iter().map(|&p| self.dims[p]).collect(),
            data: permute(&self.data, &self.dims, perm),
        }
    }

    /// Sums over every label that appears twice on this tensor.
    pub fn trace_duplicates(mut self) -> Labeled {
        loop {
            let mut pair = None;
            'outer: for i in 0..self.labels.len() {
                for j in i + 1..self.labels.len() {
                    if self.labels[i] == self.labels[j] {
                        pair = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let Some((i, j)) = pair else {
                return self;
            };
            self = self.trace_pair(i, j);
        }
    }

    fn trace_pair(&self, i: usize, j: usize) -> Labeled {
        let keep: Vec<usize> = (0..self.dims.len()).filter(|&k| k != i && k != j).collect();
        let mut perm = keep.clone();
        perm.push(i);
        perm.push(j);
        let p = self.permuted(&perm);
        let d = self.dims[i];
        let outer: usize = keep.iter().map(|&k| self.dims[k]).product();
        let mut data = Vec::with_capacity(outer);
        for o in 0..outer {
            let base = o * d * d;
            let mut acc = ZERO;
            for k in 0..d {
                acc += p.data[base + k * d + k];
            }
            data.push(acc);
        }
        Labeled {
            labels: keep.iter().map(|&k| self.labels[k]).collect(),
            dims: keep.iter().map(|&k| self.dims[k]).collect(),
            data,
        }
    }
}

/// Entry count of the tensor produced by merging `a` and `b`.
pub(crate) fn merged_size(a: &Labeled, b: &Labeled) -> u128 {
    let fa: u128 = a
        .labels
        .iter()
        .zip(&a.dims)
        .filter(|(l, _)| !b.labels.contains(l))
        .map(|(_, &d)| d as u128)
        .product();
    let fb: u128 = b
        .labels
        .iter()
        .zip(&b.dims)
        .filter(|(l, _)| !a.labels.contains(l))
        .map(|(_, &d)| d as u128)
        .product();
    fa * fb
}

/// Merges two tensors, summing over their shared labels. The result carries
/// `a`'s free labels followed by `b`'s, each in their original order.
pub(crate) fn contract(a: &Labeled, b: &Labeled, cap: usize, exec: Execution) -> Result<Labeled> {
    let entries = merged_size(a, b);
    if entries > cap as u128 {
        return Err(Error::TooLarge { entries, cap });
    }
    let mut free_a = Vec::new();
    let mut shared_a = Vec::new();
    let mut shared_b = Vec::new();
    for (i, l) in a.labels.iter().enumerate() {
        match b.labels.iter().position(|m| m == l) {
            Some(j) => {
                shared_a.push(i);
                shared_b.push(j);
            }
            None => free_a.push(i),
        }
    }
    let free_b: Vec<usize> = (0..b.labels.len()).filter(|j| !shared_b.contains(j)).collect();

    let fa: usize = free_a.iter().map(|&i| a.dims[i]).product();
    let fb: usize = free_b.iter().map(|&j| b.dims[j]).product();
    let s: usize = shared_a.iter().map(|&i| a.dims[i]).product();

    let perm_a: Vec<usize> = free_a.iter().chain(&shared_a).copied().collect();
    let perm_b: Vec<usize> = free_b.iter().chain(&shared_b).copied().collect();
    let am = permute(&a.data, &a.dims, &perm_a);
    let bm = permute(&b.data, &b.dims, &perm_b);

    let mut out = vec![ZERO; fa * fb];
    if fb > 0 {
        // one output row per chunk; each entry is a sequential dot product
        let rows_per_chunk = (4096 / fb.max(1)).max(1);
        par::for_each_chunk_mut(exec, &mut out, rows_per_chunk * fb, |ci, chunk| {
            let row0 = ci * rows_per_chunk;
            for (r, row) in chunk.chunks_mut(fb).enumerate() {
                let arow = &am[(row0 + r) * s..(row0 + r + 1) * s];
                for (j, o) in row.iter_mut().enumerate() {
                    let brow = &bm[j * s..(j + 1) * s];
                    let mut acc = ZERO;
                    for k in 0..s {
                        acc += arow[k] * brow[k];
                    }
                    *o = acc;
                }
            }
        });
    }

    let labels = free_a
        .iter()
        .map(|&i| a.labels[i])
        .chain(free_b.iter().map(|&j| b.labels[j]))
        .collect();
    let dims = free_a
        .iter()
        .map(|&i| a.dims[i])
        .chain(free_b.iter().map(|&j| b.dims[j]))
        .collect();
    Ok(Labeled {
        labels,
        dims,
        data: out,
    })
}
