use serde::{Deserialize, Serialize};

use super::circuit::{quarter_turns, Circuit, GateKind};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    /// Longest dependency chain; barriers are ignored.
    pub depth: usize,
    /// Every instruction except barriers and delays.
    pub total_gates: usize,
    pub cx_count: usize,
    /// RZ gates whose angle is not a multiple of π/2.
    pub non_clifford: usize,
}

pub fn circuit_stats(c: &Circuit) -> CircuitStats {
    let mut level = vec![0usize; c.num_qubits];
    let mut stats = CircuitStats::default();
    for inst in &c.instructions {
        if inst.kind == GateKind::Barrier {
            continue;
        }
        let l = 1 + inst.qubits.iter().map(|&q| level[q]).max().unwrap_or(0);
        for &q in &inst.qubits {
            level[q] = l;
        }
        stats.depth = stats.depth.max(l);
        if inst.kind != GateKind::Delay {
            stats.total_gates += 1;
        }
        match inst.kind {
            GateKind::CX => stats.cx_count += 1,
            GateKind::RZ if quarter_turns(inst.param.unwrap_or_default()).is_none() => stats.non_clifford += 1,
            _ => {}
        }
    }
    stats
}
