//! Adiabatic spin-chain transport and holonomic gates.
//!
//! A qubit stored in a single spin is carried down an even antiferromagnetic
//! Heisenberg chain by slowly attaching it at one end and detaching the far
//! spin. Rotating the Pauli frame of a contiguous chain segment ("twisting"
//! it) leaves the spectrum alone but rotates the transported qubit, which
//! gives every single-qubit gate. An Ising-coupled control spin choosing
//! between a twisted and an untwisted channel gives a CNOT.
//!
//! The crate is `no_std` (it needs `alloc`). Site 0 is always the most
//! significant bit of a computational-basis index, and a set bit means
//! spin down (`σ^z = -1`).
//!
//! Modules:
//! - [`spin`]: Pauli terms, operator sums and their dense/compiled forms.
//! - [`hamiltonians`]: the chain, bus and CNOT Hamiltonians.
//! - [`frame`]: Pauli-frame rotations and single-qubit gates.
//! - [`schedule`], [`dynamics`]: annealing schedules, propagation, gaps.
//! - [`state`]: state vectors, partial traces, fidelities.
//! - [`protocols`]: end-to-end bus, gate and CNOT runs plus sweeps.
//! - [`flux`]: CCJJ flux-qubit effective-parameter algebra.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod dynamics;
mod error;
pub mod flux;
pub mod frame;
pub mod hamiltonians;
pub mod linalg;
pub mod protocols;
pub mod schedule;
pub mod spin;
pub mod state;

pub use error::{Error, Result};

pub use num_complex::Complex64;
