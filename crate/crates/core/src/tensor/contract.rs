//! Whole-network contraction.
//!
//! Without an explicit order the engine merges greedily: among all pairs of
//! tensors sharing a bond, the pair whose merge grows the total entry count
//! least goes first (merged size minus both inputs), then the smaller merged
//! tensor, then the lexicographically smaller id pair. Merged tensors receive
//! fresh ids above every existing id, so the schedule is fully determined by
//! the input network.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use super::kernel::{self, Labeled};
use super::network::{Bond, LegRef, Tensor, TensorId, TensorNetwork};
use crate::linalg::{C64, ONE};
use crate::par::Execution;
use crate::{Error, Result};

/// Default cap on the entry count of any intermediate tensor.
pub const DEFAULT_MAX_ENTRIES: usize = 1 << 26;

#[derive(Clone, Copy, Debug)]
pub struct ContractOptions {
    pub max_entries: usize,
    pub execution: Execution,
}

impl Default for ContractOptions {
    fn default() -> Self {
        Self {
            max_entries: DEFAULT_MAX_ENTRIES,
            execution: Execution::default(),
        }
    }
}

impl ContractOptions {
    pub fn with_cap(max_entries: usize) -> Self {
        Self {
            max_entries,
            ..Self::default()
        }
    }
}

/// A sequence of bond indices; replaying it merges, for each bond in turn,
/// the two tensors currently holding its ends (a no-op when the bond was
/// already summed by an earlier merge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationOrder(pub Vec<usize>);

impl EliminationOrder {
    pub fn validate(&self, net: &TensorNetwork) -> Result<()> {
        let n = net.bonds().len();
        let mut seen = vec![false; n];
        for &b in &self.0 {
            if b >= n || std::mem::replace(&mut seen[b], true) {
                return Err(Error::invalid(format!(
                    "elimination order must be a permutation of the {n} bonds"
                )));
            }
        }
        if self.0.len() != n {
            return Err(Error::invalid(format!(
                "elimination order covers {} of {n} bonds",
                self.0.len()
            )));
        }
        Ok(())
    }
}

struct Workspace {
    alive: BTreeMap<usize, Labeled>,
    holders: HashMap<usize, Vec<usize>>,
    next_id: usize,
    opts: ContractOptions,
}

impl Workspace {
    fn new(net: &TensorNetwork, opts: ContractOptions) -> Self {
        let nb = net.bonds().len();
        let mut leg_label: HashMap<LegRef, usize> = HashMap::new();
        for (k, b) in net.bonds().iter().enumerate() {
            leg_label.insert(b.a, k);
            leg_label.insert(b.b, k);
        }
        for (j, &r) in net.open_legs().iter().enumerate() {
            leg_label.insert(r, nb + j);
        }
        let mut alive = BTreeMap::new();
        let mut holders: HashMap<usize, Vec<usize>> = HashMap::new();
        for t in net.tensors() {
            let labels: Vec<usize> = (0..t.rank())
                .map(|leg| leg_label[&LegRef { tensor: t.id, leg }])
                .collect();
            let lt = Labeled {
                labels,
                dims: t.shape.clone(),
                data: t.data.clone(),
            }
            .trace_duplicates();
            for &l in &lt.labels {
                holders.entry(l).or_default().push(t.id.0);
            }
            alive.insert(t.id.0, lt);
        }
        let next_id = net.max_id().map_or(0, |m| m.0 + 1);
        Self {
            alive,
            holders,
            next_id,
            opts,
        }
    }

    fn merge(&mut self, a: usize, b: usize) -> Result<usize> {
        let ta = &self.alive[&a];
        let tb = &self.alive[&b];
        let merged = kernel::contract(ta, tb, self.opts.max_entries, self.opts.execution)?;
        let touched: Vec<usize> = ta.labels.iter().chain(&tb.labels).copied().collect();
        self.alive.remove(&a);
        self.alive.remove(&b);
        let id = self.next_id;
        self.next_id += 1;
        for l in touched {
            if merged.labels.contains(&l) {
                let h = self.holders.get_mut(&l).expect("label has holders");
                h.retain(|&x| x != a && x != b);
                if !h.contains(&id) {
                    h.push(id);
                }
            } else {
                self.holders.remove(&l);
            }
        }
        self.alive.insert(id, merged);
        Ok(id)
    }

    /// (growth, merged size): growth is the merged size minus both inputs.
    fn pair_cost(&self, a: usize, b: usize) -> (i128, u128) {
        let (ta, tb) = (&self.alive[&a], &self.alive[&b]);
        let merged = kernel::merged_size(ta, tb);
        let growth = merged as i128 - ta.data.len() as i128 - tb.data.len() as i128;
        (growth, merged)
    }

    fn neighbours(&self, id: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.alive[&id]
            .labels
            .iter()
            .filter_map(|l| self.holders.get(l))
            .flatten()
            .copied()
            .filter(|&h| h != id)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn greedy(&mut self) -> Result<()> {
        let mut heap = BinaryHeap::new();
        let ids: Vec<usize> = self.alive.keys().copied().collect();
        for &a in &ids {
            for b in self.neighbours(a) {
                if a < b {
                    heap.push(Reverse((self.pair_cost(a, b), a, b)));
                }
            }
        }
        while let Some(Reverse((_, a, b))) = heap.pop() {
            if !self.alive.contains_key(&a) || !self.alive.contains_key(&b) {
                continue;
            }
            let id = self.merge(a, b)?;
            for n in self.neighbours(id) {
                heap.push(Reverse((self.pair_cost(n, id), n, id)));
            }
        }
        Ok(())
    }

    fn replay(&mut self, order: &EliminationOrder) -> Result<()> {
        for &bond in &order.0 {
            let Some(h) = self.holders.get(&bond) else {
                continue;
            };
            if h.len() == 2 && h[0] != h[1] {
                let (a, b) = (h[0], h[1]);
                self.merge(a, b)?;
            }
        }
        Ok(())
    }

    /// Outer product of whatever components remain, in id order.
    fn finish(mut self) -> Result<Labeled> {
        let mut rest = std::mem::take(&mut self.alive).into_values();
        let Some(mut acc) = rest.next() else {
            return Ok(Labeled {
                labels: Vec::new(),
                dims: Vec::new(),
                data: vec![ONE],
            });
        };
        for t in rest {
            acc = kernel::contract(&acc, &t, self.opts.max_entries, self.opts.execution)?;
        }
        Ok(acc)
    }
}

/// Contracts the whole network. A closed network yields a rank-0 tensor;
/// otherwise the result's legs follow the network's open-leg order.
pub fn contract_network(net: &TensorNetwork, order: Option<&EliminationOrder>) -> Result<Tensor> {
    contract_network_with(net, order, ContractOptions::default())
}

pub fn contract_network_with(
    net: &TensorNetwork,
    order: Option<&EliminationOrder>,
    opts: ContractOptions,
) -> Result<Tensor> {
    if let Some(o) = order {
        o.validate(net)?;
    }
    let mut ws = Workspace::new(net, opts);
    match order {
        Some(o) => ws.replay(o)?,
        None => ws.greedy()?,
    }
    let result = ws.finish()?;
    let nb = net.bonds().len();
    let perm: Vec<usize> = (0..net.open_legs().len())
        .map(|j| {
            result
                .labels
                .iter()
                .position(|&l| l == nb + j)
                .expect("open label survives contraction")
        })
        .collect();
    let out = result.permuted(&perm);
    let id = net.min_id().unwrap_or(TensorId(0));
    Ok(Tensor {
        id,
        shape: out.dims,
        data: out.data,
    })
}

/// 𝒞(T) of a closed network.
pub fn contraction_value(net: &TensorNetwork) -> Result<C64> {
    contraction_value_with(net, ContractOptions::default())
}

pub fn contraction_value_with(net: &TensorNetwork, opts: ContractOptions) -> Result<C64> {
    if !net.is_closed() {
        return Err(Error::invalid("contraction value requires a closed network"));
    }
    let t = contract_network_with(net, None, opts)?;
    Ok(t.data[0])
}

/// Replaces tensors `a` and `b` by their contraction over every bond joining
/// them. The new tensor keeps id `a`; its legs are `a`'s remaining legs
/// followed by `b`'s, in their original order.
pub fn contract_pair(net: &TensorNetwork, a: TensorId, b: TensorId) -> Result<TensorNetwork> {
    if a == b {
        return Err(Error::invalid("contract_pair needs two distinct tensors"));
    }
    let ta = net.tensor(a).ok_or(Error::UnknownTensor(a))?;
    let tb = net.tensor(b).ok_or(Error::UnknownTensor(b))?;

    // label legs: shared bonds get a common label, everything else unique
    let la: Vec<usize> = (0..ta.rank()).collect();
    let mut lb: Vec<usize> = (ta.rank()..ta.rank() + tb.rank()).collect();
    let mut joining = Vec::new();
    for (k, bond) in net.bonds().iter().enumerate() {
        let (x, y) = (bond.a, bond.b);
        if x.tensor == a && y.tensor == b {
            lb[y.leg] = la[x.leg];
            joining.push(k);
        } else if x.tensor == b && y.tensor == a {
            lb[x.leg] = la[y.leg];
            joining.push(k);
        }
    }
    let merged = kernel::contract(
        &Labeled {
            labels: la.clone(),
            dims: ta.shape.clone(),
            data: ta.data.clone(),
        },
        &Labeled {
            labels: lb.clone(),
            dims: tb.shape.clone(),
            data: tb.data.clone(),
        },
        DEFAULT_MAX_ENTRIES,
        Execution::default(),
    )?;

    // where each surviving old leg lands on the new tensor
    let mut new_leg: HashMap<(TensorId, usize), usize> = HashMap::new();
    for (pos, l) in merged.labels.iter().enumerate() {
        if let Some(leg) = la.iter().position(|x| x == l) {
            new_leg.insert((a, leg), pos);
        } else {
            let leg = lb.iter().position(|x| x == l).expect("label from b");
            new_leg.insert((b, leg), pos);
        }
    }
    let remap = |r: LegRef| -> LegRef {
        if r.tensor == a || r.tensor == b {
            LegRef {
                tensor: a,
                leg: new_leg[&(r.tensor, r.leg)],
            }
        } else {
            r
        }
    };

    let (mut tensors, bonds, open) = net.clone().into_parts();
    tensors.remove(&b);
    tensors.insert(
        a,
        Tensor {
            id: a,
            shape: merged.dims,
            data: merged.data,
        },
    );
    let bonds = bonds
        .iter()
        .enumerate()
        .filter(|(k, _)| !joining.contains(k))
        .map(|(_, bd)| Bond::new(remap(bd.a), remap(bd.b)))
        .collect();
    let open = open.into_iter().map(remap).collect();
    Ok(TensorNetwork::from_parts_unchecked(tensors, bonds, open))
}
