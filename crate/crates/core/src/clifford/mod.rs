//! Clifford proxies and the simulators used to score them.
//!
//! [`stabilizer_simulate`] gives exact distributions of Clifford circuits in
//! polynomial time; [`statevector_simulate`] is the dense reference for
//! arbitrary circuits on up to [`MAX_STATEVECTOR_QUBITS`] active qubits.

mod cliffordize;
mod statevector;
mod tableau;

use thiserror::Error;

use crate::ir::{Distribution, GateKind, IrError};

pub use cliffordize::{cliffordize, AngleRounding, CliffordDummy, CliffordizeConfig};
pub use statevector::{
    gate_matrix, pauli_matrix, statevector_simulate, statevector_simulate_with, Matrix2, Pauli, Statevector,
    MAX_STATEVECTOR_QUBITS,
};
pub use tableau::{clifford_support, stabilizer_simulate, AffineSupport, StabilizerTableau, MAX_SUPPORT_BITS};

pub(crate) use statevector::compact_map;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error("instruction {index} is not a Clifford gate")]
    NonClifford { index: usize },
    #[error("`{0}` is not in the transpiled basis")]
    NonBasisGate(GateKind),
    #[error("`{0}` is not supported by this simulator")]
    Unsupported(GateKind),
    #[error("{qubits} active qubits exceed the simulator cap of {max}")]
    TooManyQubits { qubits: usize, max: usize },
    #[error("support of 2^{free_bits} outcomes is too large to enumerate")]
    SupportTooLarge { free_bits: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Number of outcomes at or above the peak threshold.
pub fn count_peaks(dist: &Distribution) -> u64 {
    dist.support().count() as u64
}
