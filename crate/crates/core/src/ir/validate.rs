use std::fmt;

use super::circuit::{Circuit, GateKind};
use super::device::DeviceModel;

/// One reason a circuit cannot run as-is on a device.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingLayout,
    QubitOutsideDevice { index: usize, qubit: usize },
    UncoupledGate { index: usize, qubits: Vec<usize> },
    NonBasisGate { index: usize, kind: GateKind },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingLayout => write!(f, "circuit has no layout"),
            Violation::QubitOutsideDevice { index, qubit } => {
                write!(f, "instruction {index}: qubit {qubit} is not on the device")
            }
            Violation::UncoupledGate { index, qubits } => {
                write!(f, "instruction {index}: qubits {qubits:?} are not coupled")
            }
            Violation::NonBasisGate { index, kind } => {
                write!(f, "instruction {index}: `{kind}` is not a basis gate")
            }
        }
    }
}

/// Lists every hardware-constraint violation; an empty list means executable.
pub fn validate(c: &Circuit, d: &DeviceModel) -> Vec<Violation> {
    let mut report = Vec::new();
    if c.layout.is_none() {
        report.push(Violation::MissingLayout);
    }
    for (index, inst) in c.instructions.iter().enumerate() {
        if let Some(&qubit) = inst.qubits.iter().find(|&&q| q >= d.num_qubits) {
            report.push(Violation::QubitOutsideDevice { index, qubit });
            continue;
        }
        if !d.in_basis(inst.kind) {
            report.push(Violation::NonBasisGate { index, kind: inst.kind });
        }
        if inst.kind.is_multi_qubit_gate() {
            let qs = &inst.qubits;
            let coupled = qs.iter().enumerate().all(|(i, &a)| qs[i + 1..].iter().all(|&b| d.is_coupled(a, b)));
            if !coupled {
                report.push(Violation::UncoupledGate { index, qubits: qs.clone() });
            }
        }
    }
    report
}
