//! Circuit representation, circuit files, device models and basis rewriting.

mod circuit;
mod decompose;
mod device;
mod distribution;
mod qasm;
mod stats;
mod validate;

use thiserror::Error;

pub use circuit::{canonical_angle, quarter_turns, Circuit, GateKind, Instruction, CLIFFORD_ANGLE_TOL};
pub use decompose::{ccx_on_path, ccx_standard, decompose_to_basis, expand_instruction};
pub use device::{default_basis_set, edge_key, load_device_model, DeviceModel, HEAVY_HEX_27, Durations, RateOverlay};
pub use distribution::{bitstring, parse_bitstring, Counts, Distribution, PEAK_THRESHOLD};
pub use qasm::{emit_qasm, parse_qasm, QasmError};
pub use stats::{circuit_stats, CircuitStats};
pub use validate::{validate, Violation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("`{kind}` expects {expected} operands, got {found}")]
    Arity { kind: GateKind, expected: usize, found: usize },
    #[error("duplicate qubit operand in `{0}`")]
    DuplicateQubit(GateKind),
    #[error("malformed parameters for `{0}`")]
    Parameter(GateKind),
    #[error("qubit {qubit} out of range for register of size {size}")]
    QubitOutOfRange { qubit: usize, size: usize },
    #[error("clbit {clbit} out of range for register of size {size}")]
    ClbitOutOfRange { clbit: usize, size: usize },
    #[error("clbit {0} is the target of more than one measurement")]
    ClbitReused(usize),
    #[error("qubit {0} is used after being measured")]
    MidCircuitMeasurement(usize),
    #[error("`{0}` cannot be decomposed into the target basis")]
    NotDecomposable(GateKind),
    #[error("missing field: {0}")]
    MissingField(String),
    #[error("{name} = {value} is not a probability in [0, 1)")]
    Probability { name: String, value: f64 },
    #[error("invalid device model: {0}")]
    Device(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Io(String),
}
