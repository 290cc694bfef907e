use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::linalg::C64;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TensorId(pub usize);

impl fmt::Display for TensorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense complex multiway array; `data` is row-major over the legs.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub id: TensorId,
    pub shape: Vec<usize>,
    pub data: Vec<C64>,
}

impl Tensor {
    pub fn new(id: TensorId, shape: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if shape.iter().any(|&d| d == 0) {
            return Err(Error::invalid(format!("tensor {id}: zero leg dimension")));
        }
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(Error::invalid(format!(
                "tensor {id}: data length {} does not match shape product {expected}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid(format!("tensor {id}: non-finite entry")));
        }
        Ok(Self { id, shape, data })
    }

    pub fn scalar(id: TensorId, value: C64) -> Self {
        Self {
            id,
            shape: Vec::new(),
            data: vec![value],
        }
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        index.iter().zip(&self.shape).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, index: &[usize]) -> C64 {
        self.data[self.offset(index)]
    }

    /// Value of a rank-0 tensor.
    pub fn value(&self) -> Option<C64> {
        (self.shape.is_empty()).then(|| self.data[0])
    }

    pub fn conj(&self) -> Self {
        Self {
            id: self.id,
            shape: self.shape.clone(),
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LegRef {
    pub tensor: TensorId,
    pub leg: usize,
}

impl LegRef {
    pub fn new(tensor: usize, leg: usize) -> Self {
        Self {
            tensor: TensorId(tensor),
            leg,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bond {
    pub a: LegRef,
    pub b: LegRef,
}

impl Bond {
    pub fn new(a: LegRef, b: LegRef) -> Self {
        Self { a, b }
    }
}

/// Tensors joined by bonds; every leg is either bonded exactly once or listed
/// exactly once in `open`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorNetwork {
    tensors: BTreeMap<TensorId, Tensor>,
    bonds: Vec<Bond>,
    open: Vec<LegRef>,
}

impl TensorNetwork {
    pub fn new(tensors: Vec<Tensor>, bonds: Vec<Bond>, open: Vec<LegRef>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for t in tensors {
            let id = t.id;
            if map.insert(id, t).is_some() {
                return Err(Error::invalid(format!("duplicate tensor id {id}")));
            }
        }
        let net = Self {
            tensors: map,
            bonds,
            open,
        };
        net.validate()?;
        Ok(net)
    }

    pub(crate) fn from_parts_unchecked(
        tensors: BTreeMap<TensorId, Tensor>,
        bonds: Vec<Bond>,
        open: Vec<LegRef>,
    ) -> Self {
        let net = Self { tensors, bonds, open };
        debug_assert!(net.validate().is_ok(), "{:?}", net.validate());
        net
    }

    fn leg_dim(&self, r: LegRef) -> Result<usize> {
        let t = self
            .tensors
            .get(&r.tensor)
            .ok_or(Error::UnknownTensor(r.tensor))?;
        t.shape
            .get(r.leg)
            .copied()
            .ok_or_else(|| Error::invalid(format!("tensor {} has no leg {}", r.tensor, r.leg)))
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        let mut claim = |r: LegRef| -> Result<()> {
            if !seen.insert(r) {
                return Err(Error::invalid(format!(
                    "leg ({}, {}) used more than once",
                    r.tensor, r.leg
                )));
            }
            Ok(())
        };
        for bond in &self.bonds {
            if bond.a == bond.b {
                return Err(Error::invalid(format!(
                    "self-bond on leg ({}, {})",
                    bond.a.tensor, bond.a.leg
                )));
            }
            let (da, db) = (self.leg_dim(bond.a)?, self.leg_dim(bond.b)?);
            if da != db {
                return Err(Error::invalid(format!(
                    "bond dimension mismatch {da} vs {db} between tensors {} and {}",
                    bond.a.tensor, bond.b.tensor
                )));
            }
            claim(bond.a)?;
            claim(bond.b)?;
        }
        for &r in &self.open {
            self.leg_dim(r)?;
            claim(r)?;
        }
        let total: usize = self.tensors.values().map(|t| t.rank()).sum();
        if seen.len() != total {
            return Err(Error::invalid(format!(
                "{} of {total} legs are neither bonded nor open",
                total - seen.len()
            )));
        }
        Ok(())
    }

    pub fn tensors(&self) -> impl Iterator<Item = &Tensor> {
        self.tensors.values()
    }

    pub fn tensor(&self, id: TensorId) -> Option<&Tensor> {
        self.tensors.get(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = TensorId> + '_ {
        self.tensors.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn open_legs(&self) -> &[LegRef] {
        &self.open
    }

    pub fn is_closed(&self) -> bool {
        self.open.is_empty()
    }

    pub fn open_dims(&self) -> Vec<usize> {
        self.open
            .iter()
            .map(|&r| self.leg_dim(r).expect("validated"))
            .collect()
    }

    pub fn bond_dim(&self, bond: usize) -> usize {
        self.leg_dim(self.bonds[bond].a).expect("validated")
    }

    pub fn max_id(&self) -> Option<TensorId> {
        self.tensors.keys().next_back().copied()
    }

    pub fn min_id(&self) -> Option<TensorId> {
        self.tensors.keys().next().copied()
    }

    /// True when the bond graph over tensors has a single component.
    pub fn is_connected(&self) -> bool {
        let Some(start) = self.min_id() else {
            return false;
        };
        let mut adj: BTreeMap<TensorId, Vec<TensorId>> = BTreeMap::new();
        for b in &self.bonds {
            adj.entry(b.a.tensor).or_default().push(b.b.tensor);
            adj.entry(b.b.tensor).or_default().push(b.a.tensor);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            for &n in adj.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == self.tensors.len()
    }

    /// Same network with every tensor id shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Self {
        let sh = |r: LegRef| LegRef {
            tensor: TensorId(r.tensor.0 + offset),
            leg: r.leg,
        };
        let tensors = self
            .tensors
            .values()
            .map(|t| {
                let mut t = t.clone();
                t.id = TensorId(t.id.0 + offset);
                (t.id, t)
            })
            .collect();
        Self {
            tensors,
            bonds: self.bonds.iter().map(|b| Bond::new(sh(b.a), sh(b.b))).collect(),
            open: self.open.iter().map(|&r| sh(r)).collect(),
        }
    }

    /// Applies `f` to every tensor, keeping the graph.
    pub fn map_tensors(&self, mut f: impl FnMut(&Tensor) -> Tensor) -> Self {
        let tensors = self
            .tensors
            .iter()
            .map(|(&id, t)| {
                let nt = f(t);
                assert_eq!(nt.shape, t.shape, "map_tensors must preserve shapes");
                (id, Tensor { id, ..nt })
            })
            .collect();
        Self {
            tensors,
            bonds: self.bonds.clone(),
            open: self.open.clone(),
        }
    }

    pub(crate) fn into_parts(self) -> (BTreeMap<TensorId, Tensor>, Vec<Bond>, Vec<LegRef>) {
        (self.tensors, self.bonds, self.open)
    }

    /// Total number of index assignments a naive contraction would visit.
    pub fn assignment_count(&self) -> u128 {
        self.bonds
            .iter()
            .map(|b| self.leg_dim(b.a).expect("validated") as u128)
            .chain(self.open_dims().into_iter().map(|d| d as u128))
            .fold(1u128, |acc, d| acc.saturating_mul(d))
    }
}
