use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::circuit::{Circuit, GateKind, Instruction};
use super::IrError;

/// Textbook Toffoli: 6 CX with T/T† realised as RZ(±π/4), plus two H.
pub fn ccx_standard(a: usize, b: usize, t: usize) -> Vec<Instruction> {
    let cx = |c, t| Instruction::gate(GateKind::CX, &[c, t]);
    let h = |q| Instruction::gate(GateKind::H, &[q]);
    let tg = |q| Instruction::rz(FRAC_PI_4, q);
    let tdg = |q| Instruction::rz(-FRAC_PI_4, q);
    vec![
        h(t),
        cx(b, t),
        tdg(t),
        cx(a, t),
        tg(t),
        cx(b, t),
        tdg(t),
        cx(a, t),
        tg(b),
        tg(t),
        h(t),
        cx(a, b),
        tg(a),
        tdg(b),
        cx(a, b),
    ]
}

/// Toffoli for three qubits on a path `end_a - middle - end_b`, using CX
/// only on the two coupled pairs. `target` selects which of the three
/// operands is the X target (conjugated by H around a symmetric CCZ).
pub fn ccx_on_path(end_a: usize, middle: usize, end_b: usize, target: usize) -> Vec<Instruction> {
    let cx = |c, t| Instruction::gate(GateKind::CX, &[c, t]);
    let tg = |q| Instruction::rz(FRAC_PI_4, q);
    let tdg = |q| Instruction::rz(-FRAC_PI_4, q);
    let (a, m, b) = (end_a, middle, end_b);
    let mut out = vec![Instruction::gate(GateKind::H, &[target])];
    // Phase polynomial a + b + m − (a⊕m) + (a⊕b⊕m) − (a⊕b) − (b⊕m) in units of π/4.
    out.extend([tg(a), tg(b), tg(m)]);
    out.extend([cx(a, m), tdg(m)]);
    out.extend([cx(m, b), tg(b)]);
    out.extend([cx(a, m), cx(m, b), tdg(b)]);
    out.extend([cx(a, m), cx(m, b), tdg(b)]);
    out.extend([cx(a, m), cx(m, b)]);
    out.push(Instruction::gate(GateKind::H, &[target]));
    out
}

/// One rewriting step for a gate outside the basis.
fn rewrite(inst: &Instruction, basis: &BTreeSet<GateKind>) -> Result<Vec<Instruction>, IrError> {
    let q = &inst.qubits;
    let out = match inst.kind {
        GateKind::I => Vec::new(),
        GateKind::X if basis.contains(&GateKind::SX) => {
            vec![Instruction::gate(GateKind::SX, q), Instruction::gate(GateKind::SX, q)]
        }
        GateKind::H => vec![
            Instruction::rz(FRAC_PI_2, q[0]),
            Instruction::gate(GateKind::SX, q),
            Instruction::rz(FRAC_PI_2, q[0]),
        ],
        GateKind::S => vec![Instruction::rz(FRAC_PI_2, q[0])],
        GateKind::Z => vec![Instruction::rz(PI, q[0])],
        GateKind::SWAP => vec![
            Instruction::gate(GateKind::CX, &[q[0], q[1]]),
            Instruction::gate(GateKind::CX, &[q[1], q[0]]),
            Instruction::gate(GateKind::CX, &[q[0], q[1]]),
        ],
        GateKind::CCX => ccx_standard(q[0], q[1], q[2]),
        kind => return Err(IrError::NotDecomposable(kind)),
    };
    Ok(out)
}

fn expand_into(
    inst: &Instruction,
    basis: &BTreeSet<GateKind>,
    keep_ccx: bool,
    depth: usize,
    out: &mut Vec<Instruction>,
) -> Result<(), IrError> {
    if inst.kind.is_directive() || basis.contains(&inst.kind) || (keep_ccx && inst.kind == GateKind::CCX) {
        out.push(inst.clone());
        return Ok(());
    }
    if depth > 4 {
        return Err(IrError::NotDecomposable(inst.kind));
    }
    for sub in rewrite(inst, basis)? {
        expand_into(&sub, basis, keep_ccx, depth + 1, out)
            .map_err(|_| IrError::NotDecomposable(inst.kind))?;
    }
    Ok(())
}

/// Rewrite a single instruction into basis gates (CCX kept iff `keep_ccx`).
pub fn expand_instruction(
    inst: &Instruction,
    basis: &BTreeSet<GateKind>,
    keep_ccx: bool,
) -> Result<Vec<Instruction>, IrError> {
    let mut out = Vec::new();
    expand_into(inst, basis, keep_ccx, 0, &mut out)?;
    Ok(out)
}

/// Rewrite every gate into `basis`, equal to the input up to global phase.
pub fn decompose_to_basis(c: &Circuit, basis: &BTreeSet<GateKind>, keep_ccx: bool) -> Result<Circuit, IrError> {
    let mut out = c.empty_like();
    for inst in &c.instructions {
        expand_into(inst, basis, keep_ccx, 0, &mut out.instructions)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::device::default_basis_set;

    #[test]
    fn hadamard_expansion_shape() {
        let mut c = Circuit::new(1, 0);
        c.h(0);
        let d = decompose_to_basis(&c, &default_basis_set(), false).unwrap();
        let kinds: Vec<_> = d.instructions.iter().map(|i| i.kind).collect();
        assert_eq!(kinds, vec![GateKind::RZ, GateKind::SX, GateKind::RZ]);
        assert_eq!(d.instructions[0].param, Some(FRAC_PI_2));
    }

    #[test]
    fn ccx_kept_or_expanded() {
        let mut c = Circuit::new(3, 0);
        c.ccx(0, 1, 2);
        let kept = decompose_to_basis(&c, &default_basis_set(), true).unwrap();
        assert_eq!(kept, c);
        let expanded = decompose_to_basis(&c, &default_basis_set(), false).unwrap();
        assert_eq!(expanded.count(GateKind::CX), 6);
        assert_eq!(expanded.count(GateKind::CCX), 0);
    }

    #[test]
    fn path_toffoli_uses_only_path_edges() {
        let insts = ccx_on_path(0, 1, 2, 2);
        assert_eq!(insts.iter().filter(|i| i.kind == GateKind::CX).count(), 8);
        assert!(insts
            .iter()
            .filter(|i| i.kind == GateKind::CX)
            .all(|i| i.qubits.contains(&1)));
    }

    #[test]
    fn missing_basis_gate_is_an_error() {
        let mut c = Circuit::new(2, 0);
        c.cx(0, 1);
        let basis: BTreeSet<_> = [GateKind::RZ, GateKind::SX].into();
        assert!(matches!(
            decompose_to_basis(&c, &basis, false),
            Err(IrError::NotDecomposable(GateKind::CX))
        ));
    }
}
