//! Numerics for quantum optics in displaced number bases.
//!
//! A displaced number state `|n, α⟩ = D(α)|n⟩` carries a discrete photon
//! number `n` and a continuous phase-space offset `α`. This crate provides
//!
//! - truncated-Fock-space states and operators, including a brute-force
//!   displacement operator that serves as the oracle for everything else
//!   ([`operators`]),
//! - the basis-change matrix between displaced bases of different sizes and
//!   the α-representation of pure states ([`basis`]),
//! - closed-form α-representations of vacuum/single-photon superpositions
//!   and of the two-mode squeezed vacuum ([`analytic`]),
//! - a multimode linear-optical circuit engine with heralded measurements
//!   ([`circuit`]),
//! - end-to-end heralded gate pipelines: controlled-sign and Hadamard gates
//!   between coherent-state and vacuum/single-photon qubits ([`gates`]).
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to share across threads.

pub mod analytic;
pub mod basis;
pub mod circuit;
pub mod error;
pub mod fock;
pub mod gates;
pub mod math;
pub mod operators;
pub mod tolerances;

pub use error::{Error, Result};
pub use fock::{CutoffPolicy, FockVector, MultiModeState, OperatorMatrix};

pub type Complex = num_complex::Complex64;
