//! NORM, UEV and NEV by exact contraction of single- and double-layer
//! networks.

use super::{Observable, Peps};
use crate::linalg::{hermitian_norm, identity, psd_sqrt, CMatrix, C64};
use crate::oracle::apply_local;
use crate::tensor::{
    contract_network_with, contraction_value_with, Bond, ContractOptions, LegRef, Tensor, TensorId,
    TensorNetwork,
};
use crate::{Error, Result};

fn vertex_tensor(p: &Peps, v: usize, id: usize, conj: bool) -> Tensor {
    let g = p.graph();
    let mut shape = vec![g.phys_dim(v)];
    shape.extend(g.virtual_dims(v));
    let m = p.projector(v);
    let mut data = Vec::with_capacity(m.len());
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            data.push(if conj { z.conj() } else { z });
        }
    }
    Tensor {
        id: TensorId(id),
        shape,
        data,
    }
}

/// Virtual bonds of one layer whose vertex `v` has tensor id `v + offset`;
/// physical leg is leg 0, virtual legs follow in canonical order.
fn virtual_bonds(p: &Peps, offset: usize) -> Vec<Bond> {
    let g = p.graph();
    g.edges()
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let lu = 1 + g.leg_position(e.u, k).expect("edge at endpoint");
            let lv = 1 + g.leg_position(e.v, k).expect("edge at endpoint");
            Bond::new(LegRef::new(e.u + offset, lu), LegRef::new(e.v + offset, lv))
        })
        .collect()
}

/// Single-layer network: open legs are the physical legs in vertex order and
/// the contraction is the unnormalized state |ψ⟩.
pub fn peps_to_network(p: &Peps) -> TensorNetwork {
    let n = p.n_vertices();
    let tensors = (0..n).map(|v| vertex_tensor(p, v, v, false)).collect();
    let open = (0..n).map(|v| LegRef::new(v, 0)).collect();
    TensorNetwork::new(tensors, virtual_bonds(p, 0), open).expect("PEPS network is valid")
}

/// Ket layer ids `0..n`, bra layer `n..2n`, observable tensor `2n`.
/// Physical legs of `open_sites` stay open (ket legs first, then bra legs).
fn double_layer(p: &Peps, obs: Option<&Observable>, open_sites: &[usize]) -> TensorNetwork {
    let n = p.n_vertices();
    let mut tensors: Vec<Tensor> = (0..n).map(|v| vertex_tensor(p, v, v, false)).collect();
    tensors.extend((0..n).map(|v| vertex_tensor(p, v, v + n, true)));
    let mut bonds = virtual_bonds(p, 0);
    bonds.extend(virtual_bonds(p, n));
    let mut open: Vec<LegRef> = open_sites.iter().map(|&v| LegRef::new(v, 0)).collect();
    open.extend(open_sites.iter().map(|&v| LegRef::new(v + n, 0)));

    let support = obs.map_or(&[][..], |o| o.support());
    if let Some(o) = obs {
        let k = support.len();
        let mut shape: Vec<usize> = support.iter().map(|&v| p.graph().phys_dim(v)).collect();
        shape.extend_from_within(..);
        let m = o.matrix();
        let mut data = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                data.push(m[(r, c)]);
            }
        }
        tensors.push(Tensor {
            id: TensorId(2 * n),
            shape,
            data,
        });
        for (j, &v) in support.iter().enumerate() {
            bonds.push(Bond::new(LegRef::new(2 * n, j), LegRef::new(v + n, 0)));
            bonds.push(Bond::new(LegRef::new(2 * n, k + j), LegRef::new(v, 0)));
        }
    }
    for v in 0..n {
        if !support.contains(&v) && !open_sites.contains(&v) {
            bonds.push(Bond::new(LegRef::new(v, 0), LegRef::new(v + n, 0)));
        }
    }
    TensorNetwork::new(tensors, bonds, open).expect("double layer is valid")
}

/// Dense unnormalized state over the physical legs, vertex 0 most significant.
pub fn state_vector(p: &Peps) -> Result<Vec<C64>> {
    Ok(contract_network_with(&peps_to_network(p), None, ContractOptions::default())?.data)
}

pub fn norm_squared(p: &Peps) -> Result<f64> {
    norm_squared_with(p, ContractOptions::default())
}

/// Physical dimension product up to which the double layer is contracted
/// ket half first (see [`norm_squared_with`]).
pub const KET_FIRST_LIMIT: usize = 1 << 20;

fn ket_first(p: &Peps) -> bool {
    p.graph()
        .phys_dims()
        .iter()
        .try_fold(1usize, |acc, &d| {
            acc.checked_mul(d).filter(|&x| x <= KET_FIRST_LIMIT)
        })
        .is_some()
}

/// ⟨ψ|ψ⟩ from the double-layer network. When the physical space is small the
/// elimination order takes the whole ket half first; the bra half is its
/// complex conjugate and the remaining join is a dense inner product.
pub fn norm_squared_with(p: &Peps, opts: ContractOptions) -> Result<f64> {
    if ket_first(p) {
        let psi = contract_network_with(&peps_to_network(p), None, opts)?.data;
        return Ok(crate::linalg::norm_sqr(&psi));
    }
    norm_squared_double_layer(p, opts)
}

/// ⟨ψ|ψ⟩ by greedy contraction of the full double-layer network.
pub fn norm_squared_double_layer(p: &Peps, opts: ContractOptions) -> Result<f64> {
    let z = contraction_value_with(&double_layer(p, None, &[]), opts)?;
    Ok(z.re.max(0.0))
}

pub fn uev(p: &Peps, obs: &Observable) -> Result<f64> {
    uev_with(p, obs, ContractOptions::default())
}

/// ⟨ψ|A|ψ⟩ from the sandwich network, ket half first when the physical space
/// is small (as for [`norm_squared_with`]).
pub fn uev_with(p: &Peps, obs: &Observable, opts: ContractOptions) -> Result<f64> {
    obs.check_against(p)?;
    if ket_first(p) {
        let psi = contract_network_with(&peps_to_network(p), None, opts)?.data;
        let z = dense_uev(p, obs, &psi);
        return real_expectation(p, obs, z);
    }
    uev_double_layer(p, obs, opts)
}

/// ⟨ψ|A|ψ⟩ by greedy contraction of the full sandwich network.
pub fn uev_double_layer(p: &Peps, obs: &Observable, opts: ContractOptions) -> Result<f64> {
    obs.check_against(p)?;
    let z = contraction_value_with(&double_layer(p, Some(obs), &[]), opts)?;
    real_expectation(p, obs, z)
}

fn real_expectation(p: &Peps, obs: &Observable, z: C64) -> Result<f64> {
    let a_max = obs.matrix().iter().map(|x| x.norm()).fold(0.0, f64::max);
    let floor = 1e-6 * p.norm_scale() * a_max;
    if z.im.abs() > 1e-9 * z.norm().max(floor) {
        return Err(Error::Numeric(format!(
            "expectation value has imaginary part {:e} (real part {:e})",
            z.im, z.re
        )));
    }
    Ok(z.re)
}

pub fn nev(p: &Peps, obs: &Observable) -> Result<f64> {
    nev_with(p, obs, ContractOptions::default())
}

/// ⟨ψ|A|ψ⟩ / ⟨ψ|ψ⟩; a norm below 1e-14 × [`Peps::norm_scale`] is a zero-norm
/// error.
pub fn nev_with(p: &Peps, obs: &Observable, opts: ContractOptions) -> Result<f64> {
    obs.check_against(p)?;
    let (norm, u) = if ket_first(p) {
        let psi = contract_network_with(&peps_to_network(p), None, opts)?.data;
        (crate::linalg::norm_sqr(&psi), Some(dense_uev(p, obs, &psi)))
    } else {
        (norm_squared_double_layer(p, opts)?, None)
    };
    if norm <= 1e-14 * p.norm_scale() {
        return Err(Error::ZeroNorm);
    }
    let u = match u {
        Some(z) => real_expectation(p, obs, z)?,
        None => uev_double_layer(p, obs, opts)?,
    };
    Ok(u / norm)
}

fn dense_uev(p: &Peps, obs: &Observable, psi: &[C64]) -> C64 {
    let a_psi = apply_local(psi, p.graph().phys_dims(), obs.support(), obs.matrix());
    psi.iter().zip(&a_psi).map(|(a, b)| a.conj() * b).sum()
}

/// UEV from two NORM calls: with P' = (A + ‖A‖·1)^{1/2} P at the observable's
/// vertex, ⟨ψ|A|ψ⟩ = ⟨ψ'|ψ'⟩ − ‖A‖·⟨ψ|ψ⟩.
pub fn uev_via_norm(p: &Peps, obs: &Observable) -> Result<f64> {
    obs.check_against(p)?;
    let &[v] = obs.support() else {
        return Err(Error::invalid("uev_via_norm needs a single-vertex observable"));
    };
    let a = obs.matrix();
    let a_norm = hermitian_norm(a)?;
    let shifted: CMatrix = a + identity(a.nrows()) * C64::from(a_norm);
    let modified = p.with_projector(v, psd_sqrt(&shifted)? * p.projector(v))?;
    Ok(norm_squared(&modified)? - a_norm * norm_squared(p)?)
}

/// Unnormalized reduced density matrix on `sites` (rows: ket, columns: bra,
/// both row-major over `sites` in the given order).
pub fn reduced_density_matrix(p: &Peps, sites: &[usize]) -> Result<CMatrix> {
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != sites.len() || sites.iter().any(|&v| v >= p.n_vertices()) {
        return Err(Error::invalid(
            "reduced density matrix sites must be distinct vertices",
        ));
    }
    let t = contract_network_with(&double_layer(p, None, sites), None, ContractOptions::default())?;
    let dim: usize = sites.iter().map(|&v| p.graph().phys_dim(v)).product();
    Ok(crate::linalg::from_row_major(dim, dim, &t.data))
}
