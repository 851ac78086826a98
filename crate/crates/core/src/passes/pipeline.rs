use crate::ir::{ccx_on_path, ccx_standard, expand_instruction, validate, Circuit, DeviceModel, GateKind, Instruction};
use crate::rng;

use super::fusion::fuse_single_qubit;
use super::layout::{map_dense, map_noise_adaptive, map_sabre, map_trivial};
use super::routing::{route_basic, route_lookahead, route_sabre, route_stochastic};
use super::schedule::{apply_dd, schedule};
use super::{Mapper, PassCombination, PassConfig, PassError, Router};

/// Expand every three-qubit gate except deferred Toffolis.
fn expand_multi_qubit(c: &Circuit, keep_ccx: bool) -> Circuit {
    let mut out = c.empty_like();
    for inst in &c.instructions {
        match inst.kind {
            GateKind::CCX if !keep_ccx => {
                out.instructions.extend(ccx_standard(inst.qubits[0], inst.qubits[1], inst.qubits[2]))
            }
            _ => out.instructions.push(inst.clone()),
        }
    }
    out
}

/// Toffoli on coupled physical qubits: the textbook form on a triangle,
/// otherwise the path form through the qubit adjacent to the other two.
fn physical_ccx(inst: &Instruction, d: &DeviceModel) -> Result<Vec<Instruction>, PassError> {
    let q = &inst.qubits;
    let coupled = |i: usize, j: usize| d.is_coupled(q[i], q[j]);
    if coupled(0, 1) && coupled(1, 2) && coupled(0, 2) {
        return Ok(ccx_standard(q[0], q[1], q[2]));
    }
    let middle = (0..3)
        .find(|&m| (0..3).filter(|&i| i != m).all(|i| coupled(m, i)))
        .ok_or_else(|| PassError::Unroutable {
            kind: GateKind::CCX,
            qubits: q.clone(),
        })?;
    let ends: Vec<usize> = (0..3).filter(|&i| i != middle).map(|i| q[i]).collect();
    Ok(ccx_on_path(ends[0], q[middle], ends[1], q[2]))
}

/// Rewrite a routed circuit into the device basis; SWAPs become three CX
/// and deferred Toffolis are expanded against the coupling graph.
pub fn translate_to_basis(c: &Circuit, d: &DeviceModel) -> Result<Circuit, PassError> {
    let mut out = c.empty_like();
    out.layout = c.layout.clone();
    out.final_layout = c.final_layout.clone();
    for inst in &c.instructions {
        let pieces = if inst.kind == GateKind::CCX {
            physical_ccx(inst, d)?
        } else {
            vec![inst.clone()]
        };
        for piece in &pieces {
            out.instructions.extend(expand_instruction(piece, &d.basis, false)?);
        }
    }
    Ok(out)
}

/// Transpile `c` for `d` under one pass combination with default pass constants.
pub fn run_pipeline(c: &Circuit, d: &DeviceModel, p: &PassCombination, seed: u64) -> Result<Circuit, PassError> {
    run_pipeline_with(c, d, p, seed, &PassConfig::default())
}

/// Fusion → multi-qubit decomposition → mapping → routing → basis
/// translation → scheduling → dynamical decoupling.
pub fn run_pipeline_with(
    c: &Circuit,
    d: &DeviceModel,
    p: &PassCombination,
    seed: u64,
    cfg: &PassConfig,
) -> Result<Circuit, PassError> {
    cfg.check()?;
    c.check()?;
    if c.num_qubits > d.num_qubits {
        return Err(PassError::CircuitTooLarge {
            needed: c.num_qubits,
            available: d.num_qubits,
        });
    }
    let virt = expand_multi_qubit(&fuse_single_qubit(c), p.trios);
    let layout = match p.mapper {
        Mapper::Trivial => map_trivial(&virt, d)?,
        Mapper::Dense => map_dense(&virt, d)?,
        Mapper::NoiseAdaptive => map_noise_adaptive(&virt, d)?,
        Mapper::Sabre => map_sabre(&virt, d, rng::derive(seed, STREAM_PIPELINE, 1), &cfg.sabre)?,
    };
    let routed = match p.router {
        Router::Basic => route_basic(&virt, &layout, d)?,
        Router::Stochastic => route_stochastic(
            &virt,
            &layout,
            d,
            rng::derive(seed, STREAM_PIPELINE, 2),
            cfg.stochastic_trials,
        )?,
        Router::Sabre => route_sabre(&virt, &layout, d, rng::derive(seed, STREAM_PIPELINE, 3), &cfg.sabre)?,
        Router::Lookahead => route_lookahead(&virt, &layout, d, cfg.sabre.lookahead)?,
    };
    let physical = translate_to_basis(&routed.circuit, d)?;
    let mut out = schedule(&physical, d, p.scheduler)?;
    if p.dd {
        out = apply_dd(&out, d)?;
    }
    let violations = validate(&out, d);
    if !violations.is_empty() {
        return Err(PassError::Illegal(violations));
    }
    Ok(out)
}

const STREAM_PIPELINE: u64 = 0x7069_7065;
