//! Statevector realization of the variational path: diagonal Ising
//! Hamiltonians, a layered Y-rotation/CZ ansatz, expectation values,
//! parameter-shift gradient descent and outcome histograms.
//!
//! Basis index `b` holds variable `i` in bit `i` (`(b >> i) & 1`); bitstrings
//! shown to users list variables in index order.

mod hamiltonian;
mod histogram;
mod statevector;
mod vqe;

use thiserror::Error;

use crate::qubo::QuboError;

pub use hamiltonian::{hamiltonian_from_ising, DiagonalHamiltonian};
pub use histogram::{sample_distribution, Histogram, Sampling};
pub use statevector::{ansatz_state, AnsatzConfig, Statevector};
pub use vqe::{expectation, parameter_shift_gradient, vqe_minimize, VqeConfig, VqeResult};

/// Statevectors above this many qubits are refused (2^20 amplitudes, 16 MiB).
pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GateError {
    #[error("{qubits} qubits exceeds the statevector limit of {MAX_QUBITS}")]
    TooManyQubits { qubits: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Qubo(#[from] QuboError),
}

pub type Result<T> = std::result::Result<T, GateError>;

fn check_qubits(qubits: usize) -> Result<()> {
    if qubits > MAX_QUBITS {
        return Err(GateError::TooManyQubits { qubits });
    }
    Ok(())
}

/// Variable-order bits of basis index `b`.
pub(crate) fn basis_bits(b: usize, qubits: usize) -> Vec<u8> {
    (0..qubits).map(|i| ((b >> i) & 1) as u8).collect()
}

/// Basis index with the lexicographically smallest bitstring among `candidates`.
pub(crate) fn lex_smallest(
    candidates: impl Iterator<Item = usize>,
    qubits: usize,
) -> Option<usize> {
    candidates.min_by_key(|&b| basis_bits(b, qubits))
}
