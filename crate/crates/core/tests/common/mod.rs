//! Test-only reference simulator and circuit generators, kept independent of
//! the crate's own simulators.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C;
use passelect::ir::{Circuit, GateKind, Instruction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn one_qubit(kind: GateKind, param: Option<f64>) -> [[C; 2]; 2] {
    let o = C::new(0.0, 0.0);
    let l = C::new(1.0, 0.0);
    let i = C::new(0.0, 1.0);
    match kind {
        GateKind::I => [[l, o], [o, l]],
        GateKind::X => [[o, l], [l, o]],
        GateKind::Z => [[l, o], [o, -l]],
        GateKind::S => [[l, o], [o, i]],
        GateKind::H => {
            let h = C::new(FRAC_1_SQRT_2, 0.0);
            [[h, h], [h, -h]]
        }
        GateKind::SX => {
            let a = C::new(0.5, 0.5);
            let b = C::new(0.5, -0.5);
            [[a, b], [b, a]]
        }
        GateKind::RZ => {
            let t = param.unwrap();
            [[C::from_polar(1.0, -t / 2.0), o], [o, C::from_polar(1.0, t / 2.0)]]
        }
        k => panic!("{k:?} is not a single-qubit gate"),
    }
}

/// Exact outcome distribution over the clbit register, by dense evolution of
/// the qubits the circuit touches.
pub fn oracle_distribution(c: &Circuit) -> BTreeMap<u64, f64> {
    let mut active: Vec<usize> = c.instructions.iter().flat_map(|i| i.qubits.iter().copied()).collect();
    active.sort_unstable();
    active.dedup();
    let pos = |q: usize| active.binary_search(&q).unwrap();
    let n = active.len();
    assert!(n <= 22, "oracle limited to 22 active qubits");
    let mut psi = vec![C::new(0.0, 0.0); 1 << n];
    psi[0] = C::new(1.0, 0.0);
    let mut measured: Vec<(usize, usize)> = Vec::new();
    for inst in &c.instructions {
        let qs: Vec<usize> = inst.qubits.iter().map(|&q| pos(q)).collect();
        match inst.kind {
            GateKind::Measure => measured.push((qs[0], inst.clbit.unwrap())),
            GateKind::Delay | GateKind::Barrier => {}
            GateKind::CX => {
                let (cb, tb) = (1 << qs[0], 1 << qs[1]);
                for b in 0..psi.len() {
                    if b & cb != 0 && b & tb == 0 {
                        psi.swap(b, b | tb);
                    }
                }
            }
            GateKind::CCX => {
                let (a, bb, tb) = (1 << qs[0], 1 << qs[1], 1 << qs[2]);
                for b in 0..psi.len() {
                    if b & a != 0 && b & bb != 0 && b & tb == 0 {
                        psi.swap(b, b | tb);
                    }
                }
            }
            GateKind::SWAP => {
                let (x, y) = (1 << qs[0], 1 << qs[1]);
                for b in 0..psi.len() {
                    if b & x != 0 && b & y == 0 {
                        psi.swap(b, b ^ x ^ y);
                    }
                }
            }
            k => {
                let m = one_qubit(k, inst.param);
                let bit = 1 << qs[0];
                for b in 0..psi.len() {
                    if b & bit == 0 {
                        let (a0, a1) = (psi[b], psi[b | bit]);
                        psi[b] = m[0][0] * a0 + m[0][1] * a1;
                        psi[b | bit] = m[1][0] * a0 + m[1][1] * a1;
                    }
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (b, amp) in psi.iter().enumerate() {
        let p = amp.norm_sqr();
        if p < 1e-15 {
            continue;
        }
        let v = measured
            .iter()
            .fold(0u64, |acc, &(q, cb)| acc | (((b >> q) & 1) as u64) << cb);
        *out.entry(v).or_insert(0.0) += p;
    }
    out
}

pub fn max_deviation(a: &BTreeMap<u64, f64>, b: &BTreeMap<u64, f64>) -> f64 {
    a.keys()
        .chain(b.keys())
        .map(|k| (a.get(k).unwrap_or(&0.0) - b.get(k).unwrap_or(&0.0)).abs())
        .fold(0.0, f64::max)
}

pub fn as_map(d: &passelect::Distribution) -> BTreeMap<u64, f64> {
    d.probs.clone()
}

const CLIFFORD_1Q: [GateKind; 6] = [GateKind::I, GateKind::X, GateKind::SX, GateKind::H, GateKind::S, GateKind::Z];

/// Seeded random circuit with a final measurement of every qubit.
pub fn random_circuit(n: usize, gates: usize, clifford_only: bool, with_ccx: bool, seed: u64) -> Circuit {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Circuit::new(n, n);
    for _ in 0..gates {
        let roll = r.gen_range(0..10);
        if n >= 3 && with_ccx && roll == 0 {
            let mut qs: Vec<usize> = (0..n).collect();
            for i in 0..3 {
                let j = r.gen_range(i..n);
                qs.swap(i, j);
            }
            c.ccx(qs[0], qs[1], qs[2]);
        } else if n >= 2 && roll < 4 {
            let a = r.gen_range(0..n);
            let b = (a + r.gen_range(1..n)) % n;
            c.cx(a, b);
        } else if roll < 6 {
            let q = r.gen_range(0..n);
            let theta = if clifford_only {
                r.gen_range(0..4) as f64 * std::f64::consts::FRAC_PI_2
            } else {
                r.gen_range(0.0..std::f64::consts::TAU)
            };
            c.rz(theta, q);
        } else {
            let q = r.gen_range(0..n);
            c.push(Instruction::gate(CLIFFORD_1Q[r.gen_range(0..CLIFFORD_1Q.len())], &[q]));
        }
    }
    c.measure_all();
    c
}

/// Proptest strategy over `random_circuit` parameters.
pub fn arb_circuit(max_qubits: usize, max_gates: usize, clifford_only: bool, with_ccx: bool) -> impl Strategy<Value = Circuit> {
    (1..=max_qubits, 0..=max_gates, any::<u64>())
        .prop_map(move |(n, g, s)| random_circuit(n, g, clifford_only, with_ccx, s))
}
