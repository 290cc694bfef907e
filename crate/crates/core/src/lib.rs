//! Exact, desk-scale engine for Projected Entangled Pair States.
//!
//! The crate is organized around the constructions that connect PEPS,
//! postselected quantum circuits and tensor networks:
//!
//! * [`tensor`]: dense complex tensors, networks, exact contraction and the
//!   composition identities (`T ⊗ T*`, `T ⊕ T'`, phase recovery).
//! * [`peps`]: the PEPS state model with NORM / UEV / NEV evaluation.
//! * [`circuit`]: postselected circuits and their exact statevector semantics.
//! * [`duality`]: circuit → PEPS (measurement-based and spacetime layouts) and
//!   PEPS → circuit (unitary dilation plus OR-gathering of postselections).
//! * [`pathsum`]: integer path counting for Toffoli–Hadamard circuits.
//! * [`cooling`]: Trotterized imaginary-time evolution, densely and as a
//!   space × imaginary-time tensor network.
//!
//! Data-parallel inner loops run on rayon when the `parallel` feature is on
//! (the default); see [`par::Execution`].

pub mod circuit;
pub mod cooling;
pub mod duality;
mod error;
pub mod linalg;
pub mod oracle;
pub mod par;
pub mod pathsum;
pub mod peps;
pub mod random;
pub mod tensor;
mod text;

pub use error::{Error, Result};
pub use linalg::C64;
