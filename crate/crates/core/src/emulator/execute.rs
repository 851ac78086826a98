use std::collections::HashMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::clifford::{
    clifford_support, compact_map, gate_matrix, Matrix2, Pauli, SimError, Statevector, MAX_STATEVECTOR_QUBITS,
};
use crate::ir::{quarter_turns, validate, Circuit, Counts, DeviceModel, GateKind};
use crate::rng;

use super::noise::idle_pauli_probs;
use super::{EmulatorError, NoiseParams};

#[derive(Clone, Debug)]
enum Step {
    /// Instruction index into the circuit.
    Gate(usize),
    /// Independent X/Y/Z error with the given probabilities.
    Pauli1 { q: usize, probs: [f64; 3] },
    /// Two-qubit depolarizing: with probability `p`, one of the 15 non-identity Paulis.
    Depol2 { a: usize, b: usize, p: f64 },
}

/// A circuit flattened into gates and noise sites over compact qubit indices.
struct Program {
    steps: Vec<Step>,
    map: Vec<usize>,
    n: usize,
    /// `(compact qubit, clbit, readout error)` per measurement.
    measures: Vec<(usize, usize, f64)>,
}

impl Program {
    fn build(c: &Circuit, np: &NoiseParams, scale: f64) -> Self {
        let (map, n) = compact_map(c);
        let mut steps = Vec::new();
        let mut measures = Vec::new();
        let mut last_end: Vec<Option<u64>> = vec![None; c.num_qubits];
        let gate_p = |p: f64| (p * scale).clamp(0.0, 1.0);
        for (i, inst) in c.instructions.iter().enumerate() {
            if matches!(inst.kind, GateKind::Barrier | GateKind::Delay) {
                continue;
            }
            let start = inst.start_time.unwrap_or(0);
            for &q in &inst.qubits {
                if let (true, Some(end)) = (np.idle, last_end[q]) {
                    let probs = idle_pauli_probs(start.saturating_sub(end), np.t1[q], np.t2[q]);
                    if probs.iter().any(|&p| p > 0.0) {
                        steps.push(Step::Pauli1 { q: map[q], probs });
                    }
                }
                last_end[q] = Some(inst.end_time().unwrap_or(start));
            }
            match inst.kind {
                GateKind::Measure => {
                    let q = inst.qubits[0];
                    measures.push((map[q], inst.clbit.unwrap_or_default(), np.readout_error[q]));
                }
                GateKind::CX => {
                    steps.push(Step::Gate(i));
                    let (a, b) = (inst.qubits[0], inst.qubits[1]);
                    let p = gate_p(np.cx_error.get(&(a.min(b), a.max(b))).copied().unwrap_or(0.0));
                    if p > 0.0 {
                        steps.push(Step::Depol2 { a: map[a], b: map[b], p });
                    }
                }
                GateKind::RZ => steps.push(Step::Gate(i)),
                _ => {
                    steps.push(Step::Gate(i));
                    let p = gate_p(np.depol_1q);
                    if p > 0.0 {
                        for &q in &inst.qubits {
                            steps.push(Step::Pauli1 {
                                q: map[q],
                                probs: [p / 3.0; 3],
                            });
                        }
                    }
                }
            }
        }
        Program { steps, map, n, measures }
    }

    /// Draw the error events of one shot as `(step index, qubit, Pauli)`.
    fn sample_errors(&self, rng: &mut ChaCha8Rng, out: &mut Vec<(usize, usize, Pauli)>) {
        out.clear();
        for (s, step) in self.steps.iter().enumerate() {
            match *step {
                Step::Gate(_) => {}
                Step::Pauli1 { q, probs } => {
                    let u: f64 = rng.gen();
                    if u < probs[0] {
                        out.push((s, q, Pauli::X));
                    } else if u < probs[0] + probs[1] {
                        out.push((s, q, Pauli::Y));
                    } else if u < probs[0] + probs[1] + probs[2] {
                        out.push((s, q, Pauli::Z));
                    }
                }
                Step::Depol2 { a, b, p } => {
                    if rng.gen::<f64>() < p {
                        let k = rng.gen_range(1..16u8);
                        for (q, pauli) in [(a, Pauli::from_index(k & 3)), (b, Pauli::from_index(k >> 2))] {
                            if pauli != Pauli::I {
                                out.push((s, q, pauli));
                            }
                        }
                    }
                }
            }
        }
    }

    fn readout(&self, rng: &mut ChaCha8Rng, mut value: u64) -> u64 {
        for &(_, cb, p) in &self.measures {
            if p > 0.0 && rng.gen::<f64>() < p {
                value ^= 1 << cb;
            }
        }
        value
    }
}

#[derive(Clone, Copy)]
enum FrameOp {
    H(usize),
    S(usize),
    Sx(usize),
    Cx(usize, usize),
    /// Pauli gates, noise sites and timing: the frame passes through unchanged.
    Skip,
    /// A gate the frame cannot be conjugated through.
    Opaque,
}

/// How each program step acts on a Pauli frame.
fn frame_ops(c: &Circuit, prog: &Program) -> Vec<FrameOp> {
    prog.steps
        .iter()
        .map(|step| match *step {
            Step::Gate(i) => {
                let inst = &c.instructions[i];
                let q = |k: usize| prog.map[inst.qubits[k]];
                match inst.kind {
                    GateKind::H => FrameOp::H(q(0)),
                    GateKind::S => FrameOp::S(q(0)),
                    GateKind::SX => FrameOp::Sx(q(0)),
                    GateKind::CX => FrameOp::Cx(q(0), q(1)),
                    GateKind::RZ => match quarter_turns(inst.param.unwrap_or_default()) {
                        Some(k) if k % 2 == 1 => FrameOp::S(q(0)),
                        Some(_) => FrameOp::Skip,
                        None => FrameOp::Opaque,
                    },
                    GateKind::CCX | GateKind::SWAP => FrameOp::Opaque,
                    _ => FrameOp::Skip,
                }
            }
            _ => FrameOp::Skip,
        })
        .collect()
}

/// Conjugate the frame through `ops[from..]`, injecting `events` at their steps.
fn propagate(ops: &[FrameOp], from: usize, events: &[(usize, usize, Pauli)], x: &mut [bool], z: &mut [bool]) {
    let mut next = events.iter().peekable();
    for (s, op) in ops.iter().enumerate().skip(from) {
        match *op {
            FrameOp::H(q) => std::mem::swap(&mut x[q], &mut z[q]),
            FrameOp::S(q) => z[q] ^= x[q],
            FrameOp::Sx(q) => x[q] ^= z[q],
            FrameOp::Cx(a, b) => {
                x[b] ^= x[a];
                z[a] ^= z[b];
            }
            FrameOp::Skip | FrameOp::Opaque => {}
        }
        while let Some(&&(es, q, p)) = next.peek() {
            if es != s {
                break;
            }
            let (px, pz) = p.bits();
            x[q] ^= px;
            z[q] ^= pz;
            next.next();
        }
    }
}

/// Pauli-frame sampler around a noiseless stabilizer reference.
fn run_clifford(c: &Circuit, prog: &Program, shots: u64, seed: u64) -> Result<Counts, EmulatorError> {
    let reference = clifford_support(c)?.offset;
    let ops = frame_ops(c, prog);
    let mut counts = Counts::new(c.num_clbits);
    let (mut x, mut z) = (vec![false; prog.n], vec![false; prog.n]);
    let mut events = Vec::new();
    for shot in 0..shots {
        let mut rng = rng::rng(rng::derive(seed, STREAM_SHOT, shot));
        x.iter_mut().for_each(|b| *b = false);
        for b in z.iter_mut() {
            *b = rng.gen();
        }
        prog.sample_errors(&mut rng, &mut events);
        propagate(&ops, 0, &events, &mut x, &mut z);
        let mut value = reference;
        for &(q, cb, _) in &prog.measures {
            value ^= (x[q] as u64) << cb;
        }
        counts.record(prog.readout(&mut rng, value));
    }
    Ok(counts)
}

/// Bytes of saved intermediate states allowed per execution.
const CHECKPOINT_BUDGET: usize = 64 << 20;
const CACHE_BUDGET: usize = 64 << 20;

/// Statevector trajectories. Error events after the last non-Clifford gate
/// are carried to the end as a Pauli frame and flip the sampled bits; the
/// rest are replayed. Shots without replayed events sample the noiseless
/// output, single-event trajectories are cached, and replays start from the
/// nearest saved noiseless state.
fn run_statevector(c: &Circuit, prog: &Program, shots: u64, seed: u64) -> Result<Counts, EmulatorError> {
    if prog.n > MAX_STATEVECTOR_QUBITS {
        return Err(SimError::TooManyQubits {
            qubits: prog.n,
            max: MAX_STATEVECTOR_QUBITS,
        }
        .into());
    }
    let dim = 1usize << prog.n;
    let mats: Vec<Option<Matrix2<f64>>> = c
        .instructions
        .iter()
        .map(|i| gate_matrix(i.kind, i.param))
        .collect();
    let apply = |sv: &mut Statevector<f64>, step: &Step| -> Result<(), SimError> {
        if let Step::Gate(i) = *step {
            let inst = &c.instructions[i];
            match (&mats[i], inst.kind) {
                (_, GateKind::CX) => sv.apply_cx(prog.map[inst.qubits[0]], prog.map[inst.qubits[1]]),
                (Some(m), _) => sv.apply_matrix(prog.map[inst.qubits[0]], m),
                (None, kind) => return Err(SimError::Unsupported(kind)),
            }
        }
        Ok(())
    };
    let gate_steps = prog.steps.iter().filter(|s| matches!(s, Step::Gate(_))).count().max(1);
    let max_saved = (CHECKPOINT_BUDGET / (dim * 16)).max(1);
    let stride = gate_steps.div_ceil(max_saved).max(1);
    let mut checkpoints: Vec<(usize, Statevector<f64>)> = Vec::new();
    let mut sv = Statevector::<f64>::zero(prog.n);
    let mut gates_seen = 0;
    for (s, step) in prog.steps.iter().enumerate() {
        if matches!(step, Step::Gate(_)) {
            if gates_seen % stride == 0 {
                checkpoints.push((s, sv.clone()));
            }
            gates_seen += 1;
        }
        apply(&mut sv, step)?;
    }
    let cumulative = |sv: &Statevector<f64>| -> Vec<f64> {
        let mut acc = 0.0;
        sv.amplitudes()
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect()
    };
    let ideal = cumulative(&sv);
    let measure_value = |index: usize| {
        prog.measures
            .iter()
            .fold(0u64, |v, &(q, cb, _)| v | (((index >> q) & 1) as u64) << cb)
    };
    let sample = |cum: &[f64], u: f64| -> usize {
        let target = u * cum[cum.len() - 1];
        cum.partition_point(|&p| p <= target).min(cum.len() - 1)
    };
    let replay = |events: &[(usize, usize, Pauli)]| -> Result<Vec<f64>, SimError> {
        let first = events[0].0;
        let (start, base) = checkpoints
            .iter()
            .rev()
            .find(|(s, _)| *s <= first)
            .expect("a checkpoint precedes every step");
        let mut sv = base.clone();
        let mut next = events.iter().peekable();
        for (s, step) in prog.steps.iter().enumerate().skip(*start) {
            apply(&mut sv, step)?;
            while let Some(&&(es, q, p)) = next.peek() {
                if es != s {
                    break;
                }
                sv.apply_pauli(q, p);
                next.next();
            }
        }
        Ok(cumulative(&sv))
    };
    let ops = frame_ops(c, prog);
    let split = ops.iter().rposition(|o| matches!(o, FrameOp::Opaque)).map_or(0, |s| s + 1);
    let (mut x, mut z) = (vec![false; prog.n], vec![false; prog.n]);
    let max_cached = (CACHE_BUDGET / (dim * 8)).max(1);
    let mut cache: HashMap<(usize, usize, Pauli), Vec<f64>> = HashMap::new();
    let mut counts = Counts::new(c.num_clbits);
    let mut events = Vec::new();
    for shot in 0..shots {
        let mut rng = rng::rng(rng::derive(seed, STREAM_SHOT, shot));
        prog.sample_errors(&mut rng, &mut events);
        let u: f64 = rng.gen();
        let cut = events.partition_point(|e| e.0 < split);
        let (early, late) = events.split_at(cut);
        let index = match early.len() {
            0 => sample(&ideal, u),
            1 => {
                let key = early[0];
                if let Some(cum) = cache.get(&key) {
                    sample(cum, u)
                } else {
                    let cum = replay(early)?;
                    let index = sample(&cum, u);
                    if cache.len() < max_cached {
                        cache.insert(key, cum);
                    }
                    index
                }
            }
            _ => sample(&replay(early)?, u),
        };
        let mut flip = 0usize;
        if let Some(&(first, _, _)) = late.first() {
            x.iter_mut().for_each(|b| *b = false);
            z.iter_mut().for_each(|b| *b = false);
            propagate(&ops, first, late, &mut x, &mut z);
            flip = x.iter().enumerate().fold(0, |m, (q, &b)| m | (b as usize) << q);
        }
        let index = index ^ flip;
        counts.record(prog.readout(&mut rng, measure_value(index)));
    }
    Ok(counts)
}

const STREAM_SHOT: u64 = 0x7368_6f74;

fn is_clifford(c: &Circuit) -> bool {
    c.instructions.iter().all(|i| match i.kind {
        GateKind::RZ => quarter_turns(i.param.unwrap_or_default()).is_some(),
        GateKind::CCX | GateKind::SWAP => false,
        _ => true,
    })
}

/// Run `shots` noisy trajectories of a scheduled, device-legal circuit.
pub fn execute(
    c: &Circuit,
    d: &DeviceModel,
    np: &NoiseParams,
    shots: u64,
    seed: u64,
    epoch: usize,
) -> Result<Counts, EmulatorError> {
    c.check()?;
    let violations = validate(c, d);
    if !violations.is_empty() {
        return Err(EmulatorError::Invalid(violations));
    }
    if !c.is_scheduled() {
        return Err(EmulatorError::NotScheduled);
    }
    np.check()?;
    if np.readout_error.len() != d.num_qubits || np.t1.len() != d.num_qubits || np.t2.len() != d.num_qubits {
        return Err(EmulatorError::Params("noise parameters do not match the device size".into()));
    }
    let prog = Program::build(c, np, np.drift_scale(epoch)?);
    if is_clifford(c) {
        run_clifford(c, &prog, shots, seed)
    } else {
        run_statevector(c, &prog, shots, seed)
    }
}

/// The same emulator driven by calibration rates without drift: what a
/// device noise model would predict.
pub fn noise_model_predict(c: &Circuit, d: &DeviceModel, shots: u64, seed: u64) -> Result<Counts, EmulatorError> {
    execute(c, d, &NoiseParams::from_calibration(d), shots, seed, 0)
}

/// Estimated success probability from calibration data: CX and readout
/// reliabilities times `exp(−Σ_q t_q (1/t1_q + 1/t2_q))`, where `t_q` spans a
/// qubit's first to last operation.
pub fn esp_predict(c: &Circuit, d: &DeviceModel) -> f64 {
    let mut esp = 1.0;
    let mut span: Vec<Option<(u64, u64)>> = vec![None; c.num_qubits];
    for inst in &c.instructions {
        match inst.kind {
            GateKind::CX => esp *= 1.0 - d.edge_error(inst.qubits[0], inst.qubits[1]).unwrap_or(0.0),
            GateKind::Measure => esp *= 1.0 - d.readout_error.get(inst.qubits[0]).copied().unwrap_or(0.0),
            _ => {}
        }
        if inst.kind == GateKind::Barrier {
            continue;
        }
        if let (Some(s), Some(e)) = (inst.start_time, inst.end_time()) {
            for &q in &inst.qubits {
                let cur = span[q].get_or_insert((s, e));
                cur.0 = cur.0.min(s);
                cur.1 = cur.1.max(e);
            }
        }
    }
    let decay: f64 = span
        .iter()
        .enumerate()
        .filter_map(|(q, s)| s.map(|(a, b)| (q, (b - a) as f64)))
        .filter(|&(q, _)| q < d.num_qubits)
        .map(|(q, t)| t / d.t1[q] + t / d.t2[q])
        .sum();
    esp * (-decay).exp()
}
