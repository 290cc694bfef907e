//! Imaginary-time cooling toward the ground state of a local Hamiltonian.
//!
//! Two backends: dense state vectors (exact evolution in the eigenbasis, or
//! Trotter products of local exponentials) and a space × imaginary-time
//! tensor network whose open boundary is the unnormalized Trotter vector.

use crate::linalg::{
    c64, expm_hermitian, hermitian_eigh, is_hermitian, pauli_x, pauli_y, pauli_z, svd, CMatrix, C64, ZERO,
};
use crate::oracle::apply_local;
use crate::random::Rng;
use crate::tensor::{Bond, LegRef, Tensor, TensorId, TensorNetwork};
use crate::text::{parse_f64, parse_usize};
use crate::{Error, Result};

/// Largest Hilbert-space dimension handled densely.
pub const MAX_DENSE_DIM: usize = 1 << 12;
/// Gap below which the ground state is reported as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub support: Vec<usize>,
    pub matrix: CMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalHamiltonian {
    n_sites: usize,
    site_dim: usize,
    terms: Vec<Term>,
}

impl LocalHamiltonian {
    pub fn new(n_sites: usize, site_dim: usize, terms: Vec<Term>) -> Result<Self> {
        if n_sites == 0 || site_dim < 2 {
            return Err(Error::invalid(
                "a Hamiltonian needs at least one site of dimension ≥ 2",
            ));
        }
        for t in &terms {
            let mut s = t.support.clone();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() || s.len() != t.support.len() || s.iter().any(|&v| v >= n_sites) {
                return Err(Error::invalid(format!("bad term support {:?}", t.support)));
            }
            let dim = site_dim.pow(t.support.len() as u32);
            if t.matrix.nrows() != dim || t.matrix.ncols() != dim {
                return Err(Error::invalid(format!(
                    "term on {:?} needs a {dim}×{dim} matrix",
                    t.support
                )));
            }
            if !is_hermitian(&t.matrix, 1e-12) {
                return Err(Error::invalid(format!(
                    "term on {:?} is not Hermitian",
                    t.support
                )));
            }
        }
        Ok(Self {
            n_sites,
            site_dim,
            terms,
        })
    }

    /// Open transverse-field Ising chain −J Σ Z_i Z_{i+1} − g Σ X_i.
    pub fn tfi(n: usize, g: f64, j: f64) -> Result<Self> {
        let zz = pauli_z().kronecker(&pauli_z()) * c64(-j, 0.0);
        let x = pauli_x() * c64(-g, 0.0);
        let mut terms: Vec<Term> = (0..n.saturating_sub(1))
            .map(|i| Term {
                support: vec![i, i + 1],
                matrix: zz.clone(),
            })
            .collect();
        terms.extend((0..n).map(|i| Term {
            support: vec![i],
            matrix: x.clone(),
        }));
        Self::new(n, 2, terms)
    }

    /// Open Heisenberg chain Σ (X X + Y Y + Z Z).
    pub fn heisenberg(n: usize) -> Result<Self> {
        let xx = pauli_x().kronecker(&pauli_x())
            + pauli_y().kronecker(&pauli_y())
            + pauli_z().kronecker(&pauli_z());
        let terms = (0..n.saturating_sub(1))
            .map(|i| Term {
                support: vec![i, i + 1],
                matrix: xx.clone(),
            })
            .collect();
        Self::new(n, 2, terms)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn site_dim(&self) -> usize {
        self.site_dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn dim(&self) -> Result<usize> {
        (self.site_dim as u128)
            .checked_pow(self.n_sites as u32)
            .filter(|&d| d <= MAX_DENSE_DIM as u128)
            .map(|d| d as usize)
            .ok_or_else(|| {
                Error::Cap(format!(
                    "{}^{} exceeds the dense dimension cap {MAX_DENSE_DIM}",
                    self.site_dim, self.n_sites
                ))
            })
    }

    fn dims(&self) -> Vec<usize> {
        vec![self.site_dim; self.n_sites]
    }

    /// Dense matrix, site 0 most significant.
    pub fn dense(&self) -> Result<CMatrix> {
        let dim = self.dim()?;
        let dims = self.dims();
        let mut h = CMatrix::zeros(dim, dim);
        let mut basis = vec![ZERO; dim];
        for x in 0..dim {
            basis[x] = c64(1.0, 0.0);
            for t in &self.terms {
                let col = apply_local(&basis, &dims, &t.support, &t.matrix);
                for (y, z) in col.into_iter().enumerate() {
                    h[(y, x)] += z;
                }
            }
            basis[x] = ZERO;
        }
        Ok(h)
    }

    /// ⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩.
    pub fn energy(&self, psi: &[C64]) -> Result<f64> {
        let dims = self.dims();
        let mut num = ZERO;
        for t in &self.terms {
            let hp = apply_local(psi, &dims, &t.support, &t.matrix);
            num += psi.iter().zip(&hp).map(|(a, b)| a.conj() * b).sum::<C64>();
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        Ok(num.re / norm)
    }
}

/// Parses `sites n dim d` followed by `term i [j] <re im …>` lines, or a
/// single builtin line `tfi n g j` / `heis n`. `#` starts a comment.
pub fn hamiltonian_from_text(text: &str) -> Result<LocalHamiltonian> {
    let mut header: Option<(usize, usize)> = None;
    let mut terms = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let tok: Vec<&str> = body.split_whitespace().collect();
        match (tok[0], header) {
            ("tfi", None) if tok.len() == 4 && terms.is_empty() => {
                return LocalHamiltonian::tfi(parse_usize(tok[1])?, parse_f64(tok[2])?, parse_f64(tok[3])?);
            }
            ("heis", None) if tok.len() == 2 => {
                return LocalHamiltonian::heisenberg(parse_usize(tok[1])?);
            }
            ("sites", None) if tok.len() == 4 && tok[2] == "dim" => {
                header = Some((parse_usize(tok[1])?, parse_usize(tok[3])?));
            }
            ("term", Some((_, d))) => {
                let rest = &tok[1..];
                // arity is whatever leaves exactly 2·d^{2k} reals
                let k = (1..=2)
                    .find(|&k| rest.len() == k + 2 * d.pow(2 * k as u32))
                    .ok_or_else(|| Error::parse(format!("line {line}: bad term length")))?;
                let support = rest[..k]
                    .iter()
                    .map(|t| parse_usize(t))
                    .collect::<Result<Vec<_>>>()?;
                let vals = rest[k..]
                    .iter()
                    .map(|t| parse_f64(t))
                    .collect::<Result<Vec<_>>>()?;
                let data: Vec<C64> = vals.chunks(2).map(|p| c64(p[0], p[1])).collect();
                let m = d.pow(k as u32);
                terms.push(Term {
                    support,
                    matrix: CMatrix::from_row_slice(m, m, &data),
                });
            }
            _ => return Err(Error::parse(format!("line {line}: unexpected `{body}`"))),
        }
    }
    let (n, d) = header.ok_or_else(|| Error::parse("missing `sites n dim d` header"))?;
    LocalHamiltonian::new(n, d, terms)
}

pub fn hamiltonian_to_text(h: &LocalHamiltonian) -> String {
    let mut out = format!("sites {} dim {}\n", h.n_sites, h.site_dim);
    for t in &h.terms {
        out.push_str("term");
        for s in &t.support {
            out.push_str(&format!(" {s}"));
        }
        for z in crate::linalg::to_row_major(&t.matrix) {
            out.push_str(&format!(" {:?} {:?}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrotterOrder {
    First,
    Second,
}

impl std::str::FromStr for TrotterOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "first" => Ok(Self::First),
            "2" | "second" => Ok(Self::Second),
            _ => Err(Error::parse(format!("unknown Trotter order `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoolingSchedule {
    pub beta: f64,
    pub steps: usize,
    pub order: TrotterOrder,
}

impl CoolingSchedule {
    pub fn new(beta: f64, steps: usize, order: TrotterOrder) -> Result<Self> {
        if !(beta >= 0.0) || !beta.is_finite() || steps == 0 {
            return Err(Error::invalid(
                "schedule needs finite β ≥ 0 and at least one step",
            ));
        }
        Ok(Self { beta, steps, order })
    }

    pub fn dtau(&self) -> f64 {
        self.beta / self.steps as f64
    }

    /// (term index, imaginary time) in application order.
    fn sequence(&self, n_terms: usize) -> Vec<(usize, f64)> {
        let dt = self.dtau();
        let mut seq = Vec::new();
        for _ in 0..self.steps {
            match self.order {
                TrotterOrder::First => seq.extend((0..n_terms).map(|i| (i, dt))),
                TrotterOrder::Second => {
                    seq.extend((0..n_terms).map(|i| (i, dt / 2.0)));
                    seq.extend((0..n_terms).rev().map(|i| (i, dt / 2.0)));
                }
            }
        }
        seq
    }
}

#[derive(Clone, Debug)]
pub struct GroundState {
    pub energy: f64,
    pub state: Vec<C64>,
    pub gap: f64,
}

/// Full spectrum of the dense Hamiltonian, ascending.
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn spectrum(h: &LocalHamiltonian) -> Result<Spectrum> {
    let (values, vectors) = hermitian_eigh(&h.dense()?)?;
    Ok(Spectrum { values, vectors })
}

pub fn exact_ground_state(h: &LocalHamiltonian) -> Result<GroundState> {
    ground_from(&spectrum(h)?)
}

fn ground_from(s: &Spectrum) -> Result<GroundState> {
    let energy = s.values[0];
    let gap = s.values.get(1).map_or(f64::INFINITY, |e1| e1 - energy);
    if gap < DEGENERACY_GAP {
        return Err(Error::Degenerate(gap));
    }
    Ok(GroundState {
        energy,
        state: s.vectors.column(0).iter().copied().collect(),
        gap,
    })
}

/// Normalized state with ln of the norm it had before normalization.
#[derive(Clone, Debug)]
pub struct Evolved {
    pub state: Vec<C64>,
    pub log_scale: f64,
}

impl Evolved {
    /// The unnormalized vector exp(log_scale) · state.
    pub fn unnormalized(&self) -> Vec<C64> {
        let s = self.log_scale.exp();
        self.state.iter().map(|z| z * s).collect()
    }
}

fn normalize(v: &mut [C64]) -> Result<f64> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !(n >= 1e-300) {
        return Err(Error::ZeroNorm);
    }
    v.iter_mut().for_each(|z| *z /= n);
    Ok(n.ln())
}

/// Trotterized exp(−βH)|χ⟩ with renormalization after every step.
pub fn imaginary_time_evolve(h: &LocalHamiltonian, sched: &CoolingSchedule, chi: &[C64]) -> Result<Evolved> {
    let dims = h.dims();
    if chi.len() != h.dim()? {
        return Err(Error::invalid(format!(
            "initial state has {} entries, expected {}",
            chi.len(),
            h.dim()?
        )));
    }
    let mut state = chi.to_vec();
    let mut log_scale = 0.0;
    if sched.beta == 0.0 {
        return Ok(Evolved { state, log_scale });
    }
    let gates = local_exponentials(h, sched)?;
    let per_step = match sched.order {
        TrotterOrder::First => h.terms.len(),
        TrotterOrder::Second => 2 * h.terms.len(),
    };
    for (k, (i, dt)) in sched.sequence(h.terms.len()).into_iter().enumerate() {
        let t = &h.terms[i];
        state = apply_local(&state, &dims, &t.support, gates.get(i, dt));
        if (k + 1) % per_step.max(1) == 0 {
            log_scale += normalize(&mut state)?;
        }
    }
    if h.terms.is_empty() {
        log_scale += normalize(&mut state)?;
    }
    Ok(Evolved { state, log_scale })
}

struct Exponentials {
    full: Vec<CMatrix>,
    half: Vec<CMatrix>,
    dt: f64,
}

impl Exponentials {
    fn get(&self, i: usize, dt: f64) -> &CMatrix {
        if dt == self.dt {
            &self.full[i]
        } else {
            &self.half[i]
        }
    }
}

fn local_exponentials(h: &LocalHamiltonian, sched: &CoolingSchedule) -> Result<Exponentials> {
    let dt = sched.dtau();
    let full = h
        .terms
        .iter()
        .map(|t| expm_hermitian(&t.matrix, dt))
        .collect::<Result<Vec<_>>>()?;
    let half = match sched.order {
        TrotterOrder::First => Vec::new(),
        TrotterOrder::Second => h
            .terms
            .iter()
            .map(|t| expm_hermitian(&t.matrix, dt / 2.0))
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(Exponentials { full, half, dt })
}

/// exp(−βH)|χ⟩ evaluated in the eigenbasis.
pub fn exact_evolve(s: &Spectrum, beta: f64, chi: &[C64]) -> Result<Evolved> {
    let c = s.vectors.adjoint() * CMatrix::from_column_slice(chi.len(), 1, chi);
    let e0 = s.values[0];
    let mut weighted: Vec<C64> = c
        .iter()
        .zip(&s.values)
        .map(|(z, e)| z * (-beta * (e - e0)).exp())
        .collect();
    let log = normalize(&mut weighted)?;
    let v = &s.vectors * CMatrix::from_column_slice(weighted.len(), 1, &weighted);
    Ok(Evolved {
        state: v.iter().copied().collect(),
        log_scale: log - beta * e0,
    })
}

pub fn plus_state(n: usize) -> Vec<Vec<C64>> {
    let a = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![vec![a, a]; n]
}

/// Product of independent Haar-random single-site states.
pub fn haar_product_state(rng: &mut Rng, n: usize, d: usize) -> Vec<Vec<C64>> {
    (0..n)
        .map(|_| {
            let mut v: Vec<C64> = (0..d).map(|_| rng.complex()).collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
            v
        })
        .collect()
}

pub fn product_vector(sites: &[Vec<C64>]) -> Vec<C64> {
    sites.iter().fold(vec![c64(1.0, 0.0)], |acc, s| {
        acc.iter().flat_map(|a| s.iter().map(move |b| a * b)).collect()
    })
}

/// The Trotter product as a space × imaginary-time network. Open legs are
/// the final physical legs, site 0 first. Two-site exponentials are split
/// across a bond by a full-rank SVD.
pub fn cooling_network(
    h: &LocalHamiltonian,
    sched: &CoolingSchedule,
    chi: &[Vec<C64>],
) -> Result<TensorNetwork> {
    let n = h.n_sites;
    let d = h.site_dim;
    if chi.len() != n || chi.iter().any(|s| s.len() != d) {
        return Err(Error::invalid("initial product state does not match the chain"));
    }
    for t in &h.terms {
        match t.support.as_slice() {
            [_] => {}
            [a, b] if a.abs_diff(*b) == 1 => {}
            s => {
                return Err(Error::invalid(format!(
                    "term on {s:?} is not a nearest-neighbour chain term"
                )))
            }
        }
    }
    let mut tensors = Vec::new();
    let mut bonds = Vec::new();
    let mut current = Vec::with_capacity(n);
    for (i, s) in chi.iter().enumerate() {
        tensors.push(Tensor::new(TensorId(i), vec![d], s.clone())?);
        current.push(LegRef::new(i, 0));
    }
    if sched.beta > 0.0 {
        let gates = local_exponentials(h, sched)?;
        for (i, dt) in sched.sequence(h.terms.len()) {
            let t = &h.terms[i];
            let g = gates.get(i, dt);
            let id = tensors.len();
            match t.support.as_slice() {
                &[s] => {
                    // legs [out, in]
                    tensors.push(Tensor::new(
                        TensorId(id),
                        vec![d, d],
                        crate::linalg::to_row_major(g),
                    )?);
                    bonds.push(Bond::new(current[s], LegRef::new(id, 1)));
                    current[s] = LegRef::new(id, 0);
                }
                &[a, b] => {
                    let (left, right, r) = split_gate(g, d);
                    // left legs [out_a, in_a, r], right legs [r, out_b, in_b]
                    tensors.push(Tensor::new(TensorId(id), vec![d, d, r], left)?);
                    tensors.push(Tensor::new(TensorId(id + 1), vec![r, d, d], right)?);
                    bonds.push(Bond::new(LegRef::new(id, 2), LegRef::new(id + 1, 0)));
                    bonds.push(Bond::new(current[a], LegRef::new(id, 1)));
                    bonds.push(Bond::new(current[b], LegRef::new(id + 1, 2)));
                    current[a] = LegRef::new(id, 0);
                    current[b] = LegRef::new(id + 1, 1);
                }
                _ => unreachable!(),
            }
        }
    }
    TensorNetwork::new(tensors, bonds, current)
}

/// Splits G[(oa ob), (ia ib)] into A[oa, ia, r] B[r, ob, ib].
fn split_gate(g: &CMatrix, d: usize) -> (Vec<C64>, Vec<C64>, usize) {
    let mut m = CMatrix::zeros(d * d, d * d);
    for oa in 0..d {
        for ob in 0..d {
            for ia in 0..d {
                for ib in 0..d {
                    m[(oa * d + ia, ob * d + ib)] = g[(oa * d + ob, ia * d + ib)];
                }
            }
        }
    }
    let (u, s, vh) = svd(&m);
    let r = s.iter().filter(|&&x| x > 1e-14 * s[0]).count().max(1);
    let mut left = Vec::with_capacity(d * d * r);
    for row in 0..d * d {
        for k in 0..r {
            left.push(u[(row, k)] * s[k].sqrt());
        }
    }
    let mut right = Vec::with_capacity(r * d * d);
    for k in 0..r {
        for col in 0..d * d {
            right.push(vh[(k, col)] * s[k].sqrt());
        }
    }
    (left, right, r)
}

/// 1 − |⟨ψ0|ψ⟩|² for normalized states, computed from the orthogonal part.
pub fn fidelity_error(ground: &[C64], psi: &[C64]) -> f64 {
    let overlap: C64 = ground.iter().zip(psi).map(|(a, b)| a.conj() * b).sum();
    psi.iter()
        .zip(ground)
        .map(|(p, g)| (p - g * overlap).norm_sqr())
        .sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub beta: f64,
    pub steps: usize,
    pub fidelity_error: f64,
    pub energy_error: f64,
    pub trotter_fidelity_error: f64,
    pub trotter_energy_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub gap: f64,
    pub rows: Vec<ConvergenceRow>,
    /// least-squares slope of ln(fidelity error) against β over the final
    /// decade of the error; None for fewer than two usable points
    pub slope: Option<f64>,
}

/// Exact and second-order Trotter cooling at each β, with ⌈steps_per_beta·β⌉
/// steps (at least one) for the Trotter backend.
pub fn convergence_report(
    h: &LocalHamiltonian,
    betas: &[f64],
    steps_per_beta: f64,
    chi: &[C64],
) -> Result<ConvergenceReport> {
    let spec = spectrum(h)?;
    let ground = ground_from(&spec)?;
    let e0 = ground.energy;
    let mut rows = Vec::with_capacity(betas.len());
    for &beta in betas {
        let exact = exact_evolve(&spec, beta, chi)?;
        let steps = ((steps_per_beta * beta).ceil() as usize).max(1);
        let sched = CoolingSchedule::new(beta, steps, TrotterOrder::Second)?;
        let trot = imaginary_time_evolve(h, &sched, chi)?;
        rows.push(ConvergenceRow {
            beta,
            steps,
            fidelity_error: eigen_fidelity_error(&spec, &exact.state),
            energy_error: h.energy(&exact.state)? - e0,
            trotter_fidelity_error: fidelity_error(&ground.state, &trot.state),
            trotter_energy_error: h.energy(&trot.state)? - e0,
        });
    }
    let slope = final_decade_slope(&rows);
    Ok(ConvergenceReport {
        gap: ground.gap,
        rows,
        slope,
    })
}

/// Weight outside the ground state, summed in the eigenbasis so it stays
/// accurate far below machine epsilon.
fn eigen_fidelity_error(s: &Spectrum, psi: &[C64]) -> f64 {
    let c = s.vectors.adjoint() * CMatrix::from_column_slice(psi.len(), 1, psi);
    let total: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    c.iter().skip(1).map(|z| z.norm_sqr()).sum::<f64>() / total
}

fn final_decade_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.fidelity_error > 0.0)
        .map(|r| (r.beta, r.fidelity_error.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let last = pts[pts.len() - 1].1;
    let mut start = pts.len() - 2;
    while start > 0 && pts[start - 1].1 <= last + std::f64::consts::LN_10 {
        start -= 1;
    }
    let tail = &pts[start..];
    let m = tail.len() as f64;
    let (sx, sy) = tail.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let sxy: f64 = tail.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = tail.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{fidelity, from_row_major, ONE};
    use crate::oracle::jacobi_eigenvalues;
    use crate::tensor::contract_network;

    fn diag01() -> LocalHamiltonian {
        let m = from_row_major(2, 2, &[ZERO, ZERO, ZERO, ONE]);
        LocalHamiltonian::new(
            1,
            2,
            vec![Term {
                support: vec![0],
                matrix: m,
            }],
        )
        .unwrap()
    }

    #[test]
    fn single_qubit_ground_state() {
        let g = exact_ground_state(&diag01()).unwrap();
        assert!(g.energy.abs() < 1e-14 && (g.gap - 1.0).abs() < 1e-14);
        assert!(fidelity(&g.state, &[ONE, ZERO]) > 1.0 - 1e-14);
    }

    #[test]
    fn ising_pair_with_field() {
        let zz = pauli_z().kronecker(&pauli_z()) * c64(-1.0, 0.0);
        let z = pauli_z() * c64(-0.1, 0.0);
        let h = LocalHamiltonian::new(
            2,
            2,
            vec![
                Term {
                    support: vec![0, 1],
                    matrix: zz,
                },
                Term {
                    support: vec![0],
                    matrix: z.clone(),
                },
                Term {
                    support: vec![1],
                    matrix: z,
                },
            ],
        )
        .unwrap();
        let g = exact_ground_state(&h).unwrap();
        assert!(fidelity(&g.state, &[ONE, ZERO, ZERO, ZERO]) > 1.0 - 1e-14);
    }

    #[test]
    fn tfi_energy_matches_jacobi() {
        let h = LocalHamiltonian::tfi(6, 2.0, 1.0).unwrap();
        let g = exact_ground_state(&h).unwrap();
        assert!(g.gap > 0.0);
        let dense = h.dense().unwrap();
        let real: Vec<Vec<f64>> = (0..dense.nrows())
            .map(|r| (0..dense.ncols()).map(|c| dense[(r, c)].re).collect())
            .collect();
        let vals = jacobi_eigenvalues(real);
        assert!((vals[0] - g.energy).abs() < 1e-9);
        assert!((vals[1] - vals[0] - g.gap).abs() < 1e-9);
    }

    #[test]
    fn degenerate_ground_state_flagged() {
        let zz = pauli_z().kronecker(&pauli_z()) * c64(-1.0, 0.0);
        let h = LocalHamiltonian::new(
            2,
            2,
            vec![Term {
                support: vec![0, 1],
                matrix: zz,
            }],
        )
        .unwrap();
        assert!(matches!(exact_ground_state(&h), Err(Error::Degenerate(_))));
    }

    #[test]
    fn closed_form_cooling() {
        let h = diag01();
        let chi = product_vector(&plus_state(1));
        let beta = 5.0;
        let sched = CoolingSchedule::new(beta, 1000, TrotterOrder::First).unwrap();
        let out = imaginary_time_evolve(&h, &sched, &chi).unwrap();
        let want = 1.0 / (1.0 + (-2.0 * beta).exp()).sqrt();
        assert!((out.state[0].norm() - want).abs() < 1e-6);

        let zero = CoolingSchedule::new(0.0, 3, TrotterOrder::Second).unwrap();
        assert_eq!(imaginary_time_evolve(&h, &zero, &chi).unwrap().state, chi);
    }

    #[test]
    fn tfi_second_order_cooling() {
        let h = LocalHamiltonian::tfi(8, 2.0, 1.0).unwrap();
        let g = exact_ground_state(&h).unwrap();
        let sched = CoolingSchedule::new(6.0, 200, TrotterOrder::Second).unwrap();
        let out = imaginary_time_evolve(&h, &sched, &product_vector(&plus_state(8))).unwrap();
        assert!(fidelity(&out.state, &g.state).sqrt() >= 0.999);
    }

    #[test]
    fn orthogonal_start_fails() {
        // exp(−1000·|0⟩⟨0|) underflows on |0⟩
        let m = from_row_major(2, 2, &[c64(1.0e3, 0.0), ZERO, ZERO, ZERO]);
        let h = LocalHamiltonian::new(
            1,
            2,
            vec![Term {
                support: vec![0],
                matrix: m,
            }],
        )
        .unwrap();
        let sched = CoolingSchedule::new(1.0, 1, TrotterOrder::First).unwrap();
        assert!(matches!(
            imaginary_time_evolve(&h, &sched, &[ONE, ZERO]),
            Err(Error::ZeroNorm)
        ));
    }

    fn rel_diff(a: &[C64], b: &[C64]) -> f64 {
        let d: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        d / b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn network_single_step_single_term() {
        let zz = pauli_z().kronecker(&pauli_x()) + pauli_y().kronecker(&pauli_y());
        let h = LocalHamiltonian::new(
            2,
            2,
            vec![Term {
                support: vec![0, 1],
                matrix: zz.clone(),
            }],
        )
        .unwrap();
        let mut rng = Rng::seed(2);
        let chi = haar_product_state(&mut rng, 2, 2);
        let sched = CoolingSchedule::new(0.3, 1, TrotterOrder::First).unwrap();
        let net = cooling_network(&h, &sched, &chi).unwrap();
        let got = contract_network(&net, None).unwrap().data;
        let v = product_vector(&chi);
        let want = expm_hermitian(&zz, 0.3).unwrap() * CMatrix::from_column_slice(4, 1, &v);
        assert!(rel_diff(&got, want.as_slice()) < 1e-10);
    }

    #[test]
    fn network_identity_hamiltonian() {
        let zero = CMatrix::zeros(4, 4);
        let h = LocalHamiltonian::new(
            3,
            2,
            vec![Term {
                support: vec![1, 2],
                matrix: zero,
            }],
        )
        .unwrap();
        let chi = plus_state(3);
        let sched = CoolingSchedule::new(7.0, 5, TrotterOrder::Second).unwrap();
        let got = contract_network(&cooling_network(&h, &sched, &chi).unwrap(), None)
            .unwrap()
            .data;
        assert!(rel_diff(&got, &product_vector(&chi)) < 1e-14);
    }

    #[test]
    fn network_matches_dense_trotter() {
        let h = LocalHamiltonian::tfi(4, 1.5, 1.0).unwrap();
        let mut rng = Rng::seed(3);
        let chi = haar_product_state(&mut rng, 4, 2);
        for order in [TrotterOrder::First, TrotterOrder::Second] {
            let sched = CoolingSchedule::new(1.0, 10, order).unwrap();
            let got = contract_network(&cooling_network(&h, &sched, &chi).unwrap(), None)
                .unwrap()
                .data;
            let dense = imaginary_time_evolve(&h, &sched, &product_vector(&chi)).unwrap();
            assert!(rel_diff(&got, &dense.unnormalized()) < 1e-8);
        }
    }

    #[test]
    fn tfi_network_boundary_reaches_ground_state() {
        let h = LocalHamiltonian::tfi(6, 2.0, 1.0).unwrap();
        let g = exact_ground_state(&h).unwrap();
        let chi = plus_state(6);
        let sched = CoolingSchedule::new(4.0, 100, TrotterOrder::Second).unwrap();
        let got = contract_network(&cooling_network(&h, &sched, &chi).unwrap(), None)
            .unwrap()
            .data;
        let dense = imaginary_time_evolve(&h, &sched, &product_vector(&chi)).unwrap();
        assert!(rel_diff(&got, &dense.unnormalized()) < 1e-8);
        assert!(fidelity(&got, &g.state).sqrt() >= 0.995);
    }

    #[test]
    fn network_rejects_long_range_terms() {
        let zz = pauli_z().kronecker(&pauli_z());
        let h = LocalHamiltonian::new(
            3,
            2,
            vec![Term {
                support: vec![0, 2],
                matrix: zz,
            }],
        )
        .unwrap();
        let sched = CoolingSchedule::new(1.0, 1, TrotterOrder::First).unwrap();
        assert!(cooling_network(&h, &sched, &plus_state(3)).is_err());
    }

    #[test]
    fn closed_form_convergence() {
        let h = diag01();
        let betas: Vec<f64> = (1..=8).map(|k| k as f64).collect();
        let r = convergence_report(&h, &betas, 50.0, &product_vector(&plus_state(1))).unwrap();
        for row in &r.rows {
            let e = (-2.0 * row.beta).exp();
            assert!((row.fidelity_error - e / (1.0 + e)).abs() < 1e-12 * e.max(1e-300).max(1e-14));
        }
        assert!((r.slope.unwrap() + 2.0).abs() < 1e-3);
        let one = convergence_report(&h, &[1.0], 10.0, &product_vector(&plus_state(1))).unwrap();
        assert_eq!(one.rows.len(), 1);
        assert!(one.slope.is_none());
    }

    #[test]
    fn tfi_convergence_slope() {
        let h = LocalHamiltonian::tfi(6, 2.0, 1.0).unwrap();
        let mut rng = Rng::seed(9);
        let chi = product_vector(&haar_product_state(&mut rng, 6, 2));
        let betas: Vec<f64> = (1..=16).map(|k| k as f64 * 0.5).collect();
        let r = convergence_report(&h, &betas, 20.0, &chi).unwrap();
        let want = -2.0 * r.gap;
        assert!(
            (r.slope.unwrap() - want).abs() <= 0.2 * want.abs(),
            "{:?} vs {want}",
            r.slope
        );
        // exact-backend energies never increase
        for w in r.rows.windows(2) {
            assert!(w[1].energy_error <= w[0].energy_error + 1e-10);
        }
    }

    #[test]
    fn trotter_error_orders() {
        let h = LocalHamiltonian::tfi(4, 1.3, 0.7).unwrap();
        let mut rng = Rng::seed(10);
        let chi = product_vector(&haar_product_state(&mut rng, 4, 2));
        let spec = spectrum(&h).unwrap();
        let exact = exact_evolve(&spec, 1.0, &chi).unwrap().state;
        for (order, lo, hi) in [(TrotterOrder::First, 1.7, 2.3), (TrotterOrder::Second, 3.4, 4.6)] {
            let err = |m| {
                let s = CoolingSchedule::new(1.0, m, order).unwrap();
                rel_diff(&imaginary_time_evolve(&h, &s, &chi).unwrap().state, &exact)
            };
            let ratio = err(40) / err(80);
            assert!(ratio >= lo && ratio <= hi, "{order:?}: {ratio}");
        }
    }

    #[test]
    fn text_round_trip_and_builtins() {
        let h = LocalHamiltonian::tfi(3, 1.25, 0.5).unwrap();
        assert_eq!(hamiltonian_from_text(&hamiltonian_to_text(&h)).unwrap(), h);
        assert_eq!(hamiltonian_from_text("# chain\ntfi 3 1.25 0.5\n").unwrap(), h);
        assert_eq!(
            hamiltonian_from_text("heis 4").unwrap(),
            LocalHamiltonian::heisenberg(4).unwrap()
        );
        assert!(hamiltonian_from_text("sites 2 dim 2\nterm 0 1 2").is_err());
    }
}
