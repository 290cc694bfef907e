//! Brute-force reference implementations used to cross-check the fast paths.
//!
//! Everything here is exponential by construction and only meant for the
//! small instances in tests and the verification suite.

use crate::linalg::{kron, CMatrix, C64, ONE, ZERO};
use crate::peps::{Observable, Peps};
use crate::tensor::{Tensor, TensorId, TensorNetwork};
use crate::{Error, Result};

/// Largest assignment count the naive contraction accepts.
pub const NAIVE_LIMIT: u128 = 1 << 24;

/// Contracts by summing the product of entries over every joint assignment of
/// bond and open indices. Open legs come out in declared order.
pub fn naive_contract(net: &TensorNetwork) -> Result<Tensor> {
    let count = net.assignment_count();
    if count > NAIVE_LIMIT {
        return Err(Error::Cap(format!("naive contraction over {count} assignments")));
    }
    let nb = net.bonds().len();
    let mut dims: Vec<usize> = (0..nb).map(|k| net.bond_dim(k)).collect();
    let open_dims = net.open_dims();
    dims.extend(&open_dims);

    // leg -> position in the assignment vector
    let mut slot: std::collections::BTreeMap<(TensorId, usize), usize> = Default::default();
    for (k, b) in net.bonds().iter().enumerate() {
        slot.insert((b.a.tensor, b.a.leg), k);
        slot.insert((b.b.tensor, b.b.leg), k);
    }
    for (j, r) in net.open_legs().iter().enumerate() {
        slot.insert((r.tensor, r.leg), nb + j);
    }
    let tensors: Vec<(&Tensor, Vec<usize>)> = net
        .tensors()
        .map(|t| (t, (0..t.rank()).map(|l| slot[&(t.id, l)]).collect()))
        .collect();

    let out_len: usize = open_dims.iter().product();
    let mut out = vec![ZERO; out_len];
    let mut assign = vec![0usize; dims.len()];
    let mut index = Vec::new();
    loop {
        let mut term = ONE;
        for (t, slots) in &tensors {
            index.clear();
            index.extend(slots.iter().map(|&s| assign[s]));
            term *= t.get(&index);
        }
        let o = assign[nb..]
            .iter()
            .zip(&open_dims)
            .fold(0, |acc, (&i, &d)| acc * d + i);
        out[o] += term;

        let mut k = dims.len();
        loop {
            if k == 0 {
                let id = net.min_id().unwrap_or(TensorId(0));
                return Tensor::new(id, open_dims, out);
            }
            k -= 1;
            assign[k] += 1;
            if assign[k] < dims[k] {
                break;
            }
            assign[k] = 0;
        }
    }
}

pub fn naive_value(net: &TensorNetwork) -> Result<C64> {
    Ok(naive_contract(net)?.data[0])
}

/// Definition-level PEPS state: the explicit product of Σᵢ|ii⟩ pairs over
/// every edge, followed by ⊗_v P[v] applied as one matrix on the full
/// virtual space. Virtual spins are ordered by vertex, then canonical leg.
pub fn peps_state_oracle(p: &Peps) -> Result<Vec<C64>> {
    let g = p.graph();
    let n = g.n_vertices();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut spin_dims = Vec::new();
    for v in 0..n {
        offsets.push(spin_dims.len());
        spin_dims.extend(g.virtual_dims(v));
    }
    let total: u128 = spin_dims.iter().map(|&d| d as u128).product::<u128>()
        * g.phys_dims().iter().map(|&d| d as u128).product::<u128>();
    if total > 1 << 22 {
        return Err(Error::Cap(format!("definition oracle over {total} entries")));
    }
    // pair state: amplitude 1 wherever both spins of every edge agree
    let vdim: usize = spin_dims.iter().product();
    let mut pairs = vec![ZERO; vdim];
    let mut idx = vec![0usize; spin_dims.len()];
    for slot in pairs.iter_mut() {
        let agree = g.edges().iter().enumerate().all(|(k, e)| {
            let a = offsets[e.u] + g.leg_position(e.u, k).expect("leg");
            let b = offsets[e.v] + g.leg_position(e.v, k).expect("leg");
            idx[a] == idx[b]
        });
        if agree {
            *slot = ONE;
        }
        for k in (0..idx.len()).rev() {
            idx[k] += 1;
            if idx[k] < spin_dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    let big = p
        .projectors()
        .iter()
        .fold(crate::linalg::identity(1), |acc, m| kron(&acc, m));
    let psi = big * CMatrix::from_column_slice(vdim, 1, &pairs);
    Ok(psi.iter().copied().collect())
}

/// Applies `a` (acting on `support`, in that order) to a dense state whose
/// sites have dimensions `dims`, site 0 most significant.
pub fn apply_local(state: &[C64], dims: &[usize], support: &[usize], a: &CMatrix) -> Vec<C64> {
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let mut out = vec![ZERO; state.len()];
    for (x, &amp) in state.iter().enumerate() {
        if amp == ZERO {
            continue;
        }
        let mut col = 0;
        let mut base = x;
        for &s in support {
            let digit = (x / strides[s]) % dims[s];
            col = col * dims[s] + digit;
            base -= digit * strides[s];
        }
        for row in 0..a.nrows() {
            let coef = a[(row, col)];
            if coef == ZERO {
                continue;
            }
            let mut y = base;
            let mut r = row;
            for &s in support.iter().rev() {
                y += (r % dims[s]) * strides[s];
                r /= dims[s];
            }
            out[y] += coef * amp;
        }
    }
    out
}

/// ⟨ψ|A|ψ⟩ on the definition-level state.
pub fn peps_uev_oracle(p: &Peps, obs: &Observable) -> Result<f64> {
    let psi = peps_state_oracle(p)?;
    let a_psi = apply_local(&psi, p.graph().phys_dims(), obs.support(), obs.matrix());
    let z: C64 = psi.iter().zip(&a_psi).map(|(x, y)| x.conj() * y).sum();
    Ok(z.re)
}


/// Path sum over literal basis-state sequences s_0 = 0, s_1, …, s_T = x, one
/// state per time step. Each H entry is scaled by √2 so every path weight is
/// an integer; returns the numbers of +1 and −1 paths.
pub fn literal_path_sum(c: &crate::circuit::PostselectedCircuit, x: u64) -> Result<(u64, u64)> {
    let n = c.n_qubits();
    let dim = 1usize << n;
    let t = c.gates().len();
    let sequences = (dim as u128).pow(t.saturating_sub(1) as u32);
    if n > 6 || sequences > NAIVE_LIMIT {
        return Err(Error::Cap(format!("{sequences} state sequences")));
    }
    let mats: Vec<CMatrix> = c.gates().iter().map(|g| g.matrix()).collect();
    let entry = |k: usize, y: usize, from: usize| -> i64 {
        let g = &c.gates()[k];
        let qs = g.qubits();
        let bit = |s: usize, q: usize| (s >> (n - 1 - q)) & 1;
        let mask: usize = qs.iter().map(|&q| 1 << (n - 1 - q)).sum();
        if y & !mask != from & !mask {
            return 0;
        }
        let idx = |s: usize| qs.iter().fold(0, |acc, &q| (acc << 1) | bit(s, q));
        let z = mats[k][(idx(y), idx(from))];
        let scale = if matches!(g, crate::circuit::Gate::H(_)) {
            2f64.sqrt()
        } else {
            1.0
        };
        (z.re * scale).round() as i64
    };
    if t == 0 {
        return Ok((u64::from(x == 0), 0));
    }
    let (mut plus, mut minus) = (0u64, 0u64);
    let mut mid = vec![0usize; t - 1];
    for _ in 0..sequences {
        let mut w = 1i64;
        let mut prev = 0usize;
        for k in 0..t {
            let next = if k + 1 == t { x as usize } else { mid[k] };
            w *= entry(k, next, prev);
            if w == 0 {
                break;
            }
            prev = next;
        }
        match w {
            1 => plus += 1,
            -1 => minus += 1,
            _ => {}
        }
        for d in mid.iter_mut() {
            *d += 1;
            if *d < dim {
                break;
            }
            *d = 0;
        }
    }
    Ok((plus, minus))
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations,
/// ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    vals.sort_by(f64::total_cmp);
    vals
}
