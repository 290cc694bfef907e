//! Model counting and majority through a PEPS expectation value.
//!
//! The oracle circuit prepares 2^{−n/2} Σₓ |x⟩|f(x)⟩|0…0⟩. Its spacetime PEPS
//! is sliced on every ancilla output (they are back in |0⟩, so the slice
//! loses nothing) and ⟨σ_z⟩ on the f(x) qubit gives s = 2^{n−1}(1 − ⟨σ_z⟩).

use peps_core::circuit::{cnf_oracle_circuit, Cnf};
use peps_core::duality::{circuit_to_peps, Mode};
use peps_core::linalg::pauli_z;
use peps_core::peps::{nev_with, project_physical, Observable};
use peps_core::tensor::ContractOptions;
use peps_core::{Error, Result};

/// Largest variable count accepted by the PEPS route.
pub const MAX_VARS: usize = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct SatCount {
    pub n_vars: usize,
    pub count: u64,
    /// ⟨σ_z⟩ on the output qubit before rounding
    pub z: f64,
    /// distance of the unrounded count from the nearest integer
    pub residue: f64,
}

impl SatCount {
    /// s ≥ 2^{n−1}, decided on the rounded count so exact ties are stable.
    pub fn majority(&self) -> bool {
        2 * self.count >= 1u64 << self.n_vars
    }
}

pub fn count_models(f: &Cnf, opts: ContractOptions, tol: f64) -> Result<SatCount> {
    if f.n_vars == 0 || f.n_vars > MAX_VARS {
        return Err(Error::Cap(format!(
            "{} variables; the PEPS route takes 1..={MAX_VARS}",
            f.n_vars
        )));
    }
    let oc = cnf_oracle_circuit(f)?;
    let compiled = circuit_to_peps(&oc.circuit, Mode::Spacetime)?;
    let mut peps = compiled.peps;
    for q in f.n_vars + 1..oc.circuit.n_qubits() {
        peps = project_physical(&peps, compiled.output_sites[q], 0)?;
    }
    let obs = Observable::single(compiled.output_sites[oc.output], pauli_z())?;
    let z = nev_with(&peps, &obs, opts)?;
    let raw = (1u64 << (f.n_vars - 1)) as f64 * (1.0 - z);
    let rounded = raw.round();
    let residue = (raw - rounded).abs();
    if !(residue < tol) || rounded < 0.0 {
        return Err(Error::Numeric(format!(
            "model count {raw} is {residue:e} away from an integer (tolerance {tol:e})"
        )));
    }
    Ok(SatCount {
        n_vars: f.n_vars,
        count: rounded as u64,
        z,
        residue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use peps_core::random::{random_cnf, Rng};

    fn count(f: &Cnf) -> SatCount {
        count_models(f, ContractOptions::default(), 1e-6).unwrap()
    }

    #[test]
    fn constant_formulas() {
        let never = Cnf::new(3, vec![vec![1], vec![-1]]).unwrap();
        assert_eq!(count(&never).count, 0);
        assert!(!count(&never).majority());
        let always = Cnf::new(3, vec![]).unwrap();
        assert_eq!(count(&always).count, 8);
        assert!(count(&always).majority());
    }

    #[test]
    fn random_formulas_match_truth_table() {
        let mut rng = Rng::seed(5);
        for n in 3..=6 {
            let f = random_cnf(&mut rng, n, n, 3);
            let got = count(&f);
            assert_eq!(got.count, f.count_models(), "{f:?}");
            assert!(got.residue < 1e-9);
        }
    }

    #[test]
    fn exact_tie_is_majority() {
        // x1 alone: half of all assignments
        let f = Cnf::new(4, vec![vec![1]]).unwrap();
        let c = count(&f);
        assert_eq!(c.count, 8);
        assert!(c.majority());
    }

    #[test]
    fn too_many_variables() {
        let f = Cnf::new(11, vec![]).unwrap();
        assert!(matches!(
            count_models(&f, ContractOptions::default(), 1e-6),
            Err(Error::Cap(_))
        ));
    }
}
