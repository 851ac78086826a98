use crate::ir::{Circuit, DeviceModel, GateKind, Instruction};

use super::{PassError, Scheduler};

fn duration(inst: &Instruction, d: &DeviceModel) -> Result<u64, PassError> {
    match inst.kind {
        GateKind::Delay => inst.duration.ok_or(PassError::MissingDuration(GateKind::Delay)),
        kind => d.durations.of(kind).ok_or(PassError::MissingDuration(kind)),
    }
}

/// Assign start times. ALAP places every instruction as late as possible
/// within the ASAP makespan.
pub fn schedule(c: &Circuit, d: &DeviceModel, policy: Scheduler) -> Result<Circuit, PassError> {
    let durs = c.instructions.iter().map(|i| duration(i, d)).collect::<Result<Vec<_>, _>>()?;
    let mut out = c.clone();
    let mut free = vec![0u64; c.num_qubits];
    let mut starts = Vec::with_capacity(durs.len());
    for (inst, &dur) in c.instructions.iter().zip(&durs) {
        let start = inst.qubits.iter().map(|&q| free[q]).max().unwrap_or(0);
        for &q in &inst.qubits {
            free[q] = start + dur;
        }
        starts.push(start);
    }
    if policy == Scheduler::Alap {
        let makespan = free.iter().copied().max().unwrap_or(0);
        let mut latest = vec![makespan; c.num_qubits];
        for (i, inst) in c.instructions.iter().enumerate().rev() {
            let end = inst.qubits.iter().map(|&q| latest[q]).min().unwrap_or(makespan);
            let start = end - durs[i];
            for &q in &inst.qubits {
                latest[q] = start;
            }
            starts[i] = start;
        }
    }
    for ((inst, start), dur) in out.instructions.iter_mut().zip(starts).zip(durs) {
        inst.start_time = Some(start);
        inst.duration = Some(dur);
    }
    Ok(out)
}

/// Fill idle windows of length at least `2·d1q + 2` between two operations
/// on the same qubit with a centred `X · delay · X` block.
pub fn apply_dd(c: &Circuit, d: &DeviceModel) -> Result<Circuit, PassError> {
    if !c.is_scheduled() {
        return Err(PassError::NotScheduled);
    }
    let d1 = d.durations.single;
    let threshold = 2 * d1 + 2;
    // blocks[i]: instructions to insert right after instruction i
    let mut blocks: Vec<Vec<Instruction>> = vec![Vec::new(); c.instructions.len()];
    let mut last: Vec<Option<usize>> = vec![None; c.num_qubits];
    for (i, inst) in c.instructions.iter().enumerate() {
        if inst.kind == GateKind::Barrier {
            continue;
        }
        let start = inst.start_time.unwrap();
        for &q in &inst.qubits {
            if let Some(prev) = last[q] {
                let prev_end = c.instructions[prev].end_time().unwrap();
                let window = start.saturating_sub(prev_end);
                if window >= threshold {
                    blocks[prev].extend(dd_block(q, prev_end, window, d1));
                }
            }
            last[q] = Some(i);
        }
    }
    let mut out = c.empty_like();
    out.layout = c.layout.clone();
    out.final_layout = c.final_layout.clone();
    for (inst, block) in c.instructions.iter().zip(blocks) {
        out.instructions.push(inst.clone());
        out.instructions.extend(block);
    }
    Ok(out)
}

fn dd_block(q: usize, from: u64, window: u64, d1: u64) -> Vec<Instruction> {
    let tau = window - 2 * d1;
    let mid = tau / 2;
    let pre = (tau - mid) / 2;
    let post = tau - mid - pre;
    let mut out = Vec::new();
    let mut t = from;
    let mut timed = |mut inst: Instruction, dur: u64, out: &mut Vec<Instruction>| {
        inst.start_time = Some(t);
        inst.duration = Some(dur);
        t += dur;
        out.push(inst);
    };
    if pre > 0 {
        timed(Instruction::delay(pre, q), pre, &mut out);
    }
    timed(Instruction::gate(GateKind::X, &[q]), d1, &mut out);
    timed(Instruction::delay(mid, q), mid, &mut out);
    timed(Instruction::gate(GateKind::X, &[q]), d1, &mut out);
    if post > 0 {
        timed(Instruction::delay(post, q), post, &mut out);
    }
    out
}
