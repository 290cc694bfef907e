//! Compilation between postselected circuits and PEPS.
//!
//! * [`circuit_to_peps`] lays a circuit out either as its spacetime tensor
//!   network ([`Mode::Spacetime`]) or as a measurement pattern on a projected
//!   cluster state ([`Mode::Mbqc`]).
//! * [`peps_to_circuit`] prepares Bell pairs on every edge, applies a unitary
//!   dilation of each projector with one ancilla per vertex, and gathers all
//!   ancilla postselections into one with [`gather_postselections`].

mod dilate;
mod format;
mod mbqc;
mod spacetime;

pub use dilate::{dilate, gather_postselections, norm_via_nev, peps_to_circuit, CompiledCircuit};
pub use format::{
    compiled_circuit_from_text, compiled_circuit_to_text, compiled_peps_from_text, compiled_peps_to_text,
};
pub use mbqc::zxz_angles;

use crate::circuit::PostselectedCircuit;
use crate::peps::Peps;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Projected cluster state; gates from {H, X, CZ, CNOT, U1}.
    Mbqc,
    /// One vertex per input, gate and output; any gate.
    Spacetime,
}

impl std::str::FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mbqc" => Ok(Mode::Mbqc),
            "spacetime" => Ok(Mode::Spacetime),
            _ => Err(crate::Error::parse(format!("unknown mode `{s}`"))),
        }
    }
}

/// A PEPS whose state on `output_sites` is `scale` times the circuit's
/// unnormalized postselected output vector (up to a global phase). All other
/// vertices have physical dimension 1.
#[derive(Clone, Debug)]
pub struct CompiledPeps {
    pub peps: Peps,
    pub scale: f64,
    /// vertex carrying qubit q, for every qubit of the circuit
    pub output_sites: Vec<usize>,
}

pub fn circuit_to_peps(c: &PostselectedCircuit, mode: Mode) -> Result<CompiledPeps> {
    match mode {
        Mode::Spacetime => spacetime::compile(c),
        Mode::Mbqc => mbqc::compile(c),
    }
}

#[cfg(test)]
mod tests;
