//! Network compositions whose contraction values obey
//! 𝒞(A ⊗ B) = 𝒞(A)·𝒞(B), 𝒞(T*) = conj 𝒞(T) and 𝒞(A ⊕ B) = 𝒞(A) + 𝒞(B),
//! and the reconstruction of a complex 𝒞(T) from a |𝒞|² oracle.

use std::collections::BTreeMap;

use super::contract::contraction_value;
use super::network::{Bond, LegRef, Tensor, TensorId, TensorNetwork};
use crate::linalg::{c64, C64, ONE, ZERO};
use crate::{Error, Result};

/// Single rank-0 tensor holding `value`.
pub fn scalar_network(value: C64) -> TensorNetwork {
    TensorNetwork::from_parts_unchecked(
        BTreeMap::from([(TensorId(0), Tensor::scalar(TensorId(0), value))]),
        Vec::new(),
        Vec::new(),
    )
}

/// A 1×1 matrix `[value]` closed by a trace bond; contracts to `value`.
pub fn loop_network(value: C64) -> TensorNetwork {
    let t = Tensor {
        id: TensorId(0),
        shape: vec![1, 1],
        data: vec![value],
    };
    TensorNetwork::from_parts_unchecked(
        BTreeMap::from([(TensorId(0), t)]),
        vec![Bond::new(LegRef::new(0, 0), LegRef::new(0, 1))],
        Vec::new(),
    )
}

fn require_closed(net: &TensorNetwork, what: &str) -> Result<()> {
    if !net.is_closed() {
        return Err(Error::invalid(format!("{what} requires closed networks")));
    }
    Ok(())
}

/// Disjoint union; ids of `b` are shifted above those of `a`.
pub fn network_tensor_product(a: &TensorNetwork, b: &TensorNetwork) -> Result<TensorNetwork> {
    require_closed(a, "tensor product")?;
    require_closed(b, "tensor product")?;
    Ok(disjoint_union(a, b))
}

fn disjoint_union(a: &TensorNetwork, b: &TensorNetwork) -> TensorNetwork {
    let offset = a.max_id().map_or(0, |m| m.0 + 1);
    let b = b.shifted(offset);
    let (mut tensors, mut bonds, mut open) = a.clone().into_parts();
    let (tb, bb, ob) = b.into_parts();
    tensors.extend(tb);
    bonds.extend(bb);
    open.extend(ob);
    TensorNetwork::from_parts_unchecked(tensors, bonds, open)
}

pub fn conjugate_network(a: &TensorNetwork) -> TensorNetwork {
    a.map_tensors(Tensor::conj)
}

/// Multiplies the tensor `id` by `phase`.
pub fn rotate_tensor(a: &TensorNetwork, id: TensorId, phase: C64) -> Result<TensorNetwork> {
    a.tensor(id).ok_or(Error::UnknownTensor(id))?;
    Ok(a.map_tensors(|t| {
        if t.id == id {
            Tensor {
                data: t.data.iter().map(|z| z * phase).collect(),
                ..t.clone()
            }
        } else {
            t.clone()
        }
    }))
}

fn require_sum_operand(net: &TensorNetwork) -> Result<()> {
    require_closed(net, "direct sum")?;
    if net.is_empty() {
        return Err(Error::invalid("direct sum of an empty network"));
    }
    if !net.is_connected() {
        return Err(Error::invalid(
            "direct sum requires connected networks (a disconnected network contracts to a product)",
        ));
    }
    Ok(())
}

/// Embeds `t` into a tensor whose legs are widened by `pad_before` and
/// `pad_after` index slots, the original block sitting at offset `pad_before`.
fn widen(t: &Tensor, pad_before: usize, pad_after: usize) -> Tensor {
    let shape: Vec<usize> = t.shape.iter().map(|d| d + pad_before + pad_after).collect();
    let mut data = vec![ZERO; shape.iter().product()];
    let mut idx = vec![0usize; t.rank()];
    for &v in &t.data {
        let off = idx
            .iter()
            .zip(&shape)
            .fold(0, |acc, (&i, &d)| acc * d + i + pad_before);
        data[off] = v;
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < t.shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    Tensor {
        id: t.id,
        shape,
        data,
    }
}

/// Appends one leg of dimension 2: slot `active_slot` carries `active`,
/// the other slot carries `idle`.
fn with_bridge(active: &Tensor, idle: &Tensor, active_slot: usize) -> Tensor {
    debug_assert_eq!(active.shape, idle.shape);
    let mut shape = active.shape.clone();
    shape.push(2);
    let mut data = Vec::with_capacity(active.len() * 2);
    for (x, y) in active.data.iter().zip(&idle.data) {
        if active_slot == 0 {
            data.push(*x);
            data.push(*y);
        } else {
            data.push(*y);
            data.push(*x);
        }
    }
    Tensor {
        id: active.id,
        shape,
        data,
    }
}

/// 𝒞(A ⊕ B) = 𝒞(A) + 𝒞(B) for closed, connected operands with arbitrary
/// graphs.
///
/// Every bond of `a` gains one extra "idle" index (the last one) and every
/// bond of `b` one leading idle index. Each tensor is the block embedding of
/// its original entries plus a 1 at the all-idle index, so a connected
/// operand contributes either its full contraction or exactly 1. A bridge
/// bond of dimension 2 between the lowest-id tensor of each operand selects
/// which operand is active, so the mixed terms vanish.
pub fn network_direct_sum(a: &TensorNetwork, b: &TensorNetwork) -> Result<TensorNetwork> {
    require_sum_operand(a)?;
    require_sum_operand(b)?;
    let offset = a.max_id().map_or(0, |m| m.0 + 1);
    let b = b.shifted(offset);
    let anchor_a = a.min_id().expect("nonempty");
    let anchor_b = b.min_id().expect("nonempty");

    let mut tensors = BTreeMap::new();
    // idle index: last slot on the legs of `a`, slot 0 on the legs of `b`
    let operands = [(a, anchor_a, 0, 1, usize::MAX), (&b, anchor_b, 1, 0, 0)];
    for (bridge_slot, (net, anchor, before, after, idle)) in operands.into_iter().enumerate() {
        for t in net.tensors() {
            let active = widen(t, before, after);
            let built = if t.id == anchor {
                let idle_only = set_all_slot(&zeros_like(&active), idle, ONE);
                with_bridge(&active, &idle_only, bridge_slot)
            } else {
                set_all_slot(&active, idle, ONE)
            };
            tensors.insert(t.id, built);
        }
    }
    let mut bonds: Vec<Bond> = a.bonds().to_vec();
    bonds.extend_from_slice(b.bonds());
    let ra = tensors[&anchor_a].rank() - 1;
    let rb = tensors[&anchor_b].rank() - 1;
    bonds.push(Bond::new(
        LegRef {
            tensor: anchor_a,
            leg: ra,
        },
        LegRef {
            tensor: anchor_b,
            leg: rb,
        },
    ));
    Ok(TensorNetwork::from_parts_unchecked(tensors, bonds, Vec::new()))
}

fn zeros_like(t: &Tensor) -> Tensor {
    Tensor {
        id: t.id,
        shape: t.shape.clone(),
        data: vec![ZERO; t.len()],
    }
}

/// Writes `value` at the index whose every component is `slot`
/// (`usize::MAX` meaning each leg's last index).
fn set_all_slot(t: &Tensor, slot: usize, value: C64) -> Tensor {
    let mut out = t.clone();
    let off = t.shape.iter().fold(0, |acc, &d| {
        let i = if slot == usize::MAX { d - 1 } else { slot };
        acc * d + i
    });
    out.data[off] = value;
    out
}

/// Block direct sum of two networks with identical structure (same ids,
/// bonds and leg layout). Each bond dimension becomes `D_a + D_b`; tensors
/// carry `a` on all-first-range indices and `b` on all-second-range indices.
pub fn direct_sum_same_graph(a: &TensorNetwork, b: &TensorNetwork) -> Result<TensorNetwork> {
    require_sum_operand(a)?;
    require_sum_operand(b)?;
    if a.bonds() != b.bonds() || a.ids().ne(b.ids()) {
        return Err(Error::invalid("same-graph direct sum needs identical structure"));
    }
    let mut tensors = BTreeMap::new();
    for (ta, tb) in a.tensors().zip(b.tensors()) {
        if ta.rank() != tb.rank() || ta.rank() == 0 {
            return Err(Error::invalid(
                "same-graph direct sum needs matching tensors of nonzero rank",
            ));
        }
        let shape: Vec<usize> = ta.shape.iter().zip(&tb.shape).map(|(x, y)| x + y).collect();
        let mut data = vec![ZERO; shape.iter().product()];
        for (src, shift) in [(ta, 0usize), (tb, 1usize)] {
            let mut idx = vec![0usize; src.rank()];
            for &v in &src.data {
                let off = idx.iter().enumerate().fold(0, |acc, (k, &i)| {
                    let base = if shift == 1 { ta.shape[k] } else { 0 };
                    acc * shape[k] + base + i
                });
                data[off] = v;
                for k in (0..idx.len()).rev() {
                    idx[k] += 1;
                    if idx[k] < src.shape[k] {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        }
        tensors.insert(
            ta.id,
            Tensor {
                id: ta.id,
                shape,
                data,
            },
        );
    }
    Ok(TensorNetwork::from_parts_unchecked(
        tensors,
        a.bonds().to_vec(),
        Vec::new(),
    ))
}

/// 𝒞(a) + c via a direct sum with the loop network of value `c`.
pub fn append_scalar(a: &TensorNetwork, c: f64) -> Result<TensorNetwork> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid(format!("append_scalar needs c > 0, got {c}")));
    }
    network_direct_sum(a, &loop_network(c64(c, 0.0)))
}

/// |𝒞(T)|² computed as the contraction of T ⊗ T*.
pub fn norm_oracle(net: &TensorNetwork) -> Result<f64> {
    let doubled = network_tensor_product(net, &conjugate_network(net))?;
    Ok(contraction_value(&doubled)?.re.max(0.0))
}

fn sum_with_conjugate(net: &TensorNetwork) -> Result<TensorNetwork> {
    network_direct_sum(net, &conjugate_network(net))
}

/// Re 𝒞(T) from |·|² oracle calls only: |Re| from the oracle on T ⊕ T*, the
/// sign by appending c = 2|Re| and checking whether 𝒞 doubles or cancels.
fn real_part<F>(oracle: &F, net: &TensorNetwork) -> Result<f64>
where
    F: Fn(&TensorNetwork) -> Result<f64>,
{
    let s = sum_with_conjugate(net)?;
    let four_re_sq = oracle(&s)?;
    if four_re_sq < 0.0 {
        return Err(Error::Numeric("oracle returned a negative value".into()));
    }
    let magnitude = four_re_sq.sqrt() / 2.0;
    if magnitude == 0.0 {
        return Ok(0.0);
    }
    let shifted = append_scalar(&s, 2.0 * magnitude)?;
    let probe = oracle(&shifted)?;
    // Re ≥ 0 predicts (4|Re|)², Re < 0 predicts 0
    let positive = (probe - 16.0 * magnitude * magnitude).abs();
    let negative = probe.abs();
    Ok(if positive <= negative {
        magnitude
    } else {
        -magnitude
    })
}

/// Reconstructs 𝒞(net) using only an oracle returning |𝒞(·)|².
///
/// The imaginary part is the real part of the network with its lowest-id
/// tensor multiplied by −i.
pub fn recover_complex_contraction<F>(oracle: F, net: &TensorNetwork) -> Result<C64>
where
    F: Fn(&TensorNetwork) -> Result<f64>,
{
    require_sum_operand(net)?;
    let magnitude_sq = oracle(net)?;
    let re = real_part(&oracle, net)?;
    let rotated = rotate_tensor(net, net.min_id().expect("nonempty"), c64(0.0, -1.0))?;
    let im = real_part(&oracle, &rotated)?;
    let rebuilt = re * re + im * im;
    if (rebuilt - magnitude_sq).abs() > 1e-6 * magnitude_sq.max(rebuilt) + 1e-300 {
        return Err(Error::Numeric(format!(
            "oracle inconsistency: |C|² = {magnitude_sq:e} but Re² + Im² = {rebuilt:e}"
        )));
    }
    Ok(c64(re, im))
}
