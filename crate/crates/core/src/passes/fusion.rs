use std::f64::consts::PI;

use num_complex::Complex64;

use crate::clifford::{gate_matrix, Matrix2};
use crate::ir::{canonical_angle, Circuit, GateKind, Instruction};

const EQ_TOL: f64 = 1e-10;

fn mul(a: &Matrix2<f64>, b: &Matrix2<f64>) -> Matrix2<f64> {
    let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

/// Whether two unitaries agree up to a global phase.
fn equal_up_to_phase(a: &Matrix2<f64>, b: &Matrix2<f64>) -> bool {
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            tr += a[i][j].conj() * b[i][j];
        }
    }
    tr.norm() / 2.0 > 1.0 - EQ_TOL
}

/// Unitary of a run of single-qubit gates applied left to right.
pub fn unitary_of_run(run: &[Instruction]) -> Option<Matrix2<f64>> {
    let mut u = gate_matrix(GateKind::I, None)?;
    for inst in run {
        u = mul(&gate_matrix(inst.kind, inst.param)?, &u);
    }
    Some(u)
}

fn is_zero_angle(theta: f64) -> bool {
    let t = canonical_angle(theta);
    t < EQ_TOL || (2.0 * PI - t) < EQ_TOL
}

/// Candidate rewrites of `u` on qubit `q`, shortest first.
fn candidates(u: &Matrix2<f64>, q: usize) -> Vec<Vec<Instruction>> {
    let mut out = vec![Vec::new()];
    for kind in [GateKind::X, GateKind::SX, GateKind::H, GateKind::S, GateKind::Z] {
        out.push(vec![Instruction::gate(kind, &[q])]);
    }
    if u[0][1].norm() < EQ_TOL && u[1][0].norm() < EQ_TOL {
        out.push(vec![Instruction::rz((u[1][1] / u[0][0]).arg(), q)]);
    }
    // U ∝ RZ(φ + π) · SX · RZ(θ + π) · SX · RZ(λ)
    let theta = 2.0 * u[1][0].norm().atan2(u[0][0].norm());
    let (phi, lambda) = if u[1][0].norm() < EQ_TOL {
        (0.0, (u[1][1] / u[0][0]).arg())
    } else if u[0][0].norm() < EQ_TOL {
        ((u[1][0] / -u[0][1]).arg(), 0.0)
    } else {
        let a = u[0][0].arg();
        (u[1][0].arg() - a, (-u[0][1]).arg() - a)
    };
    let zsx: Vec<Instruction> = [
        Instruction::rz(lambda, q),
        Instruction::gate(GateKind::SX, &[q]),
        Instruction::rz(theta + PI, q),
        Instruction::gate(GateKind::SX, &[q]),
        Instruction::rz(phi + PI, q),
    ]
    .into_iter()
    .filter(|i| i.kind != GateKind::RZ || !is_zero_angle(i.param.unwrap()))
    .collect();
    out.push(zsx);
    out
}

/// Shortest equivalent of a run of single-qubit gates, never longer than the run.
fn fuse_run(run: &[Instruction]) -> Vec<Instruction> {
    let Some(u) = unitary_of_run(run) else {
        return run.to_vec();
    };
    let q = run[0].qubits[0];
    for cand in candidates(&u, q) {
        if cand.len() >= run.len() {
            break;
        }
        if unitary_of_run(&cand).is_some_and(|v| equal_up_to_phase(&u, &v)) {
            return cand;
        }
    }
    run.to_vec()
}

/// Merge maximal runs of single-qubit gates on each qubit into the shortest
/// equivalent sequence (up to global phase).
pub fn fuse_single_qubit(c: &Circuit) -> Circuit {
    let mut out = c.empty_like();
    out.layout = c.layout.clone();
    out.final_layout = c.final_layout.clone();
    let mut pending: Vec<Vec<Instruction>> = vec![Vec::new(); c.num_qubits];
    let flush = |q: usize, pending: &mut Vec<Vec<Instruction>>, out: &mut Circuit| {
        let run = std::mem::take(&mut pending[q]);
        if !run.is_empty() {
            out.instructions.extend(fuse_run(&run));
        }
    };
    for inst in &c.instructions {
        if inst.kind.is_single_qubit_gate() && inst.start_time.is_none() {
            pending[inst.qubits[0]].push(inst.clone());
            continue;
        }
        for &q in &inst.qubits {
            flush(q, &mut pending, &mut out);
        }
        out.instructions.push(inst.clone());
    }
    for q in 0..c.num_qubits {
        flush(q, &mut pending, &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn kinds(c: &Circuit) -> Vec<GateKind> {
        c.instructions.iter().map(|i| i.kind).collect()
    }

    #[test]
    fn hzh_becomes_x() {
        let mut c = Circuit::new(1, 1);
        c.h(0).z(0).h(0).measure(0, 0);
        assert_eq!(kinds(&fuse_single_qubit(&c)), vec![GateKind::X, GateKind::Measure]);
    }

    #[test]
    fn inverse_pair_vanishes() {
        let mut c = Circuit::new(2, 0);
        c.h(0).h(0).rz(0.3, 1).rz(-0.3, 1);
        assert!(fuse_single_qubit(&c).instructions.is_empty());
    }

    #[test]
    fn rz_chain_merges() {
        let mut c = Circuit::new(1, 0);
        c.rz(0.2, 0).s(0).rz(0.1, 0);
        let f = fuse_single_qubit(&c);
        assert_eq!(kinds(&f), vec![GateKind::RZ]);
        assert!((f.instructions[0].param.unwrap() - (0.3 + FRAC_PI_2)).abs() < 1e-9);
    }

    #[test]
    fn general_run_uses_zsx_form() {
        let mut c = Circuit::new(1, 0);
        c.h(0).rz(0.3, 0).h(0).rz(0.7, 0).sx(0).s(0).rz(1.1, 0);
        let f = fuse_single_qubit(&c);
        assert!(f.instructions.len() <= 5);
        let (a, b) = (unitary_of_run(&c.instructions).unwrap(), unitary_of_run(&f.instructions).unwrap());
        assert!(equal_up_to_phase(&a, &b));
    }

    #[test]
    fn multi_qubit_gates_are_boundaries() {
        let mut c = Circuit::new(2, 0);
        c.h(0).cx(0, 1).h(0);
        assert_eq!(fuse_single_qubit(&c).instructions, c.instructions);
    }
}
