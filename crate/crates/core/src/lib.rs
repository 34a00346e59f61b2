//! Variational-quantum-circuit optimization on an exact statevector simulator.
//!
//! The crate provides parameterized ansatz circuits, Pauli Hamiltonians for
//! MaxCut, number partitioning, and Heisenberg chains, classical and quantum
//! Fisher information matrices with quantum-resource accounting, and the
//! gradient-descent / natural-gradient optimizer family built on them.

pub mod circuit;
pub mod error;
pub mod experiment;
pub mod fisher;
pub mod hamiltonian;
pub mod linalg;
pub mod optimize;
pub mod problems;
pub mod statevector;

pub use error::{Error, Result};
pub use statevector::{Axis, Statevector, MAX_QUBITS};

/// Stable seed derivation for per-iteration and per-instance RNG streams.
///
/// SplitMix64 finalizer over the pair; identical inputs give identical seeds
/// on every platform.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
