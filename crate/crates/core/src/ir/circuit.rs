use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, TAU};
use std::fmt;

use super::IrError;

/// Gate tags understood by every stage of the tool.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    I,
    X,
    SX,
    H,
    S,
    Z,
    RZ,
    CX,
    CCX,
    SWAP,
    Measure,
    Delay,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 13] = [
        GateKind::I,
        GateKind::X,
        GateKind::SX,
        GateKind::H,
        GateKind::S,
        GateKind::Z,
        GateKind::RZ,
        GateKind::CX,
        GateKind::CCX,
        GateKind::SWAP,
        GateKind::Measure,
        GateKind::Delay,
        GateKind::Barrier,
    ];

    /// Lower-case mnemonic used in circuit files and device basis lists.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::I => "id",
            GateKind::X => "x",
            GateKind::SX => "sx",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Z => "z",
            GateKind::RZ => "rz",
            GateKind::CX => "cx",
            GateKind::CCX => "ccx",
            GateKind::SWAP => "swap",
            GateKind::Measure => "measure",
            GateKind::Delay => "delay",
            GateKind::Barrier => "barrier",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        let kind = match name.to_ascii_lowercase().as_str() {
            "id" | "i" => GateKind::I,
            "x" => GateKind::X,
            "sx" => GateKind::SX,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "z" => GateKind::Z,
            "rz" => GateKind::RZ,
            "cx" | "cnot" => GateKind::CX,
            "ccx" | "toffoli" => GateKind::CCX,
            "swap" => GateKind::SWAP,
            "measure" => GateKind::Measure,
            "delay" => GateKind::Delay,
            "barrier" => GateKind::Barrier,
            _ => return None,
        };
        Some(kind)
    }

    /// Fixed operand count, `None` for barriers.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::CX | GateKind::SWAP => Some(2),
            GateKind::CCX => Some(3),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    pub fn is_single_qubit_gate(self) -> bool {
        matches!(
            self,
            GateKind::I | GateKind::X | GateKind::SX | GateKind::H | GateKind::S | GateKind::Z | GateKind::RZ
        )
    }

    pub fn is_multi_qubit_gate(self) -> bool {
        matches!(self, GateKind::CX | GateKind::SWAP | GateKind::CCX)
    }

    /// Non-unitary or timing-only directives that are legal on any device.
    pub fn is_directive(self) -> bool {
        matches!(self, GateKind::Measure | GateKind::Delay | GateKind::Barrier)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reduce an angle into `[0, 2π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Tolerance used when deciding whether an angle is a multiple of π/2.
pub const CLIFFORD_ANGLE_TOL: f64 = 1e-12;

/// Returns `k` in `0..4` when `theta ≡ k·π/2 (mod 2π)` within [`CLIFFORD_ANGLE_TOL`].
pub fn quarter_turns(theta: f64) -> Option<u8> {
    let t = canonical_angle(theta);
    let k = (t / FRAC_PI_2).round();
    if (t - k * FRAC_PI_2).abs() <= CLIFFORD_ANGLE_TOL {
        Some((k as i64).rem_euclid(4) as u8)
    } else {
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    /// Classical target, measurements only.
    pub clbit: Option<usize>,
    /// Rotation angle in radians, RZ only.
    pub param: Option<f64>,
    /// Duration in dt, filled by scheduling (always set for delays).
    pub duration: Option<u64>,
    pub start_time: Option<u64>,
}

impl Instruction {
    fn bare(kind: GateKind, qubits: Vec<usize>) -> Self {
        Instruction {
            kind,
            qubits,
            clbit: None,
            param: None,
            duration: None,
            start_time: None,
        }
    }

    /// A fixed-arity gate without parameters.
    pub fn gate(kind: GateKind, qubits: &[usize]) -> Self {
        debug_assert!(kind != GateKind::RZ && !kind.is_directive());
        Self::bare(kind, qubits.to_vec())
    }

    pub fn rz(theta: f64, qubit: usize) -> Self {
        Instruction {
            param: Some(canonical_angle(theta)),
            ..Self::bare(GateKind::RZ, vec![qubit])
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Instruction {
            clbit: Some(clbit),
            ..Self::bare(GateKind::Measure, vec![qubit])
        }
    }

    pub fn delay(duration: u64, qubit: usize) -> Self {
        Instruction {
            duration: Some(duration),
            ..Self::bare(GateKind::Delay, vec![qubit])
        }
    }

    pub fn barrier(qubits: &[usize]) -> Self {
        Self::bare(GateKind::Barrier, qubits.to_vec())
    }

    /// Same instruction acting on remapped qubits.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Self {
        Instruction {
            qubits: self.qubits.iter().map(|&q| map(q)).collect(),
            ..self.clone()
        }
    }

    /// Structural equality ignoring scheduling annotations.
    pub fn same_operation(&self, other: &Instruction) -> bool {
        self.kind == other.kind
            && self.qubits == other.qubits
            && self.clbit == other.clbit
            && self.param == other.param
            && (self.kind != GateKind::Delay || self.duration == other.duration)
    }

    pub fn end_time(&self) -> Option<u64> {
        Some(self.start_time? + self.duration.unwrap_or(0))
    }

    fn check(&self) -> Result<(), IrError> {
        if let Some(n) = self.kind.arity() {
            if self.qubits.len() != n {
                return Err(IrError::Arity {
                    kind: self.kind,
                    expected: n,
                    found: self.qubits.len(),
                });
            }
        }
        let distinct: BTreeSet<_> = self.qubits.iter().collect();
        if distinct.len() != self.qubits.len() {
            return Err(IrError::DuplicateQubit(self.kind));
        }
        if (self.kind == GateKind::RZ) != self.param.is_some() {
            return Err(IrError::Parameter(self.kind));
        }
        if (self.kind == GateKind::Measure) != self.clbit.is_some() {
            return Err(IrError::Parameter(self.kind));
        }
        if self.kind == GateKind::Delay && self.duration.is_none() {
            return Err(IrError::Parameter(self.kind));
        }
        Ok(())
    }
}

/// An ordered instruction list over virtual or physical qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub instructions: Vec<Instruction>,
    /// Virtual → physical map applied to produce this circuit, if mapped.
    pub layout: Option<Vec<usize>>,
    /// Where each virtual qubit sits at the end of the circuit after routing.
    pub final_layout: Option<Vec<usize>>,
}

impl Circuit {
    pub fn new(num_qubits: usize, num_clbits: usize) -> Self {
        Circuit {
            num_qubits,
            num_clbits,
            instructions: Vec::new(),
            layout: None,
            final_layout: None,
        }
    }

    /// An empty circuit with the same registers and layout metadata.
    pub fn empty_like(&self) -> Self {
        Circuit {
            instructions: Vec::new(),
            ..self.clone()
        }
    }

    pub fn push(&mut self, inst: Instruction) -> &mut Self {
        self.instructions.push(inst);
        self
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::gate(GateKind::H, &[q]))
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::gate(GateKind::X, &[q]))
    }

    pub fn sx(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::gate(GateKind::SX, &[q]))
    }

    pub fn s(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::gate(GateKind::S, &[q]))
    }

    pub fn z(&mut self, q: usize) -> &mut Self {
        self.push(Instruction::gate(GateKind::Z, &[q]))
    }

    pub fn rz(&mut self, theta: f64, q: usize) -> &mut Self {
        self.push(Instruction::rz(theta, q))
    }

    pub fn cx(&mut self, c: usize, t: usize) -> &mut Self {
        self.push(Instruction::gate(GateKind::CX, &[c, t]))
    }

    pub fn ccx(&mut self, a: usize, b: usize, t: usize) -> &mut Self {
        self.push(Instruction::gate(GateKind::CCX, &[a, b, t]))
    }

    pub fn swap(&mut self, a: usize, b: usize) -> &mut Self {
        self.push(Instruction::gate(GateKind::SWAP, &[a, b]))
    }

    pub fn measure(&mut self, q: usize, c: usize) -> &mut Self {
        self.push(Instruction::measure(q, c))
    }

    pub fn barrier(&mut self, qubits: &[usize]) -> &mut Self {
        self.push(Instruction::barrier(qubits))
    }

    pub fn delay(&mut self, duration: u64, q: usize) -> &mut Self {
        self.push(Instruction::delay(duration, q))
    }

    /// Measure qubit `i` into clbit `i` for every qubit of the classical register.
    pub fn measure_all(&mut self) -> &mut Self {
        for q in 0..self.num_clbits.min(self.num_qubits) {
            self.measure(q, q);
        }
        self
    }

    /// Checks operand well-formedness, register bounds and terminal measurements.
    pub fn check(&self) -> Result<(), IrError> {
        let mut measured = vec![false; self.num_qubits];
        let mut used_clbits = BTreeSet::new();
        for inst in &self.instructions {
            inst.check()?;
            for &q in &inst.qubits {
                if q >= self.num_qubits {
                    return Err(IrError::QubitOutOfRange {
                        qubit: q,
                        size: self.num_qubits,
                    });
                }
            }
            match inst.kind {
                GateKind::Measure => {
                    let c = inst.clbit.unwrap_or_default();
                    if c >= self.num_clbits {
                        return Err(IrError::ClbitOutOfRange {
                            clbit: c,
                            size: self.num_clbits,
                        });
                    }
                    if !used_clbits.insert(c) {
                        return Err(IrError::ClbitReused(c));
                    }
                    let q = inst.qubits[0];
                    if measured[q] {
                        return Err(IrError::MidCircuitMeasurement(q));
                    }
                    measured[q] = true;
                }
                GateKind::Barrier | GateKind::Delay => {}
                _ => {
                    if let Some(&q) = inst.qubits.iter().find(|&&q| measured[q]) {
                        return Err(IrError::MidCircuitMeasurement(q));
                    }
                }
            }
        }
        Ok(())
    }

    /// Qubits touched by at least one non-barrier instruction, ascending.
    pub fn active_qubits(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_qubits];
        for inst in &self.instructions {
            if inst.kind != GateKind::Barrier {
                for &q in &inst.qubits {
                    seen[q] = true;
                }
            }
        }
        (0..self.num_qubits).filter(|&q| seen[q]).collect()
    }

    pub fn is_scheduled(&self) -> bool {
        self.instructions.iter().all(|i| i.start_time.is_some())
    }

    /// Scheduled length: the latest instruction end time.
    pub fn makespan(&self) -> u64 {
        self.instructions
            .iter()
            .filter_map(Instruction::end_time)
            .max()
            .unwrap_or(0)
    }

    pub fn count(&self, kind: GateKind) -> usize {
        self.instructions.iter().filter(|i| i.kind == kind).count()
    }

    /// Equality of registers and operations, ignoring start times and
    /// scheduling durations.
    pub fn same_operations(&self, other: &Circuit) -> bool {
        self.num_qubits == other.num_qubits
            && self.num_clbits == other.num_clbits
            && self.instructions.len() == other.instructions.len()
            && self
                .instructions
                .iter()
                .zip(&other.instructions)
                .all(|(a, b)| a.same_operation(b))
    }

    /// Instruction list reversed, used by layout search. Measurements are dropped.
    pub(crate) fn reversed_gates(&self) -> Circuit {
        let mut out = self.empty_like();
        out.instructions = self
            .instructions
            .iter()
            .rev()
            .filter(|i| i.kind != GateKind::Measure)
            .cloned()
            .collect();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn angles_are_canonical() {
        assert_eq!(canonical_angle(-FRAC_PI_2), 1.5 * PI);
        assert_eq!(canonical_angle(TAU), 0.0);
        assert!(canonical_angle(-1e-300) < TAU);
    }

    #[test]
    fn quarter_turn_detection() {
        assert_eq!(quarter_turns(0.0), Some(0));
        assert_eq!(quarter_turns(PI), Some(2));
        assert_eq!(quarter_turns(-FRAC_PI_2), Some(3));
        assert_eq!(quarter_turns(TAU - 1e-14), Some(0));
        assert_eq!(quarter_turns(PI / 4.0), None);
    }

    #[test]
    fn duplicate_operands_rejected() {
        let mut c = Circuit::new(2, 0);
        c.cx(0, 0);
        assert!(matches!(c.check(), Err(IrError::DuplicateQubit(GateKind::CX))));
    }

    #[test]
    fn gate_after_measure_rejected() {
        let mut c = Circuit::new(1, 1);
        c.measure(0, 0).x(0);
        assert!(matches!(c.check(), Err(IrError::MidCircuitMeasurement(0))));
    }

    #[test]
    fn clbit_reuse_rejected() {
        let mut c = Circuit::new(2, 1);
        c.measure(0, 0).measure(1, 0);
        assert!(matches!(c.check(), Err(IrError::ClbitReused(0))));
    }
}
