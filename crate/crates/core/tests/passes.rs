mod common;

use std::collections::BTreeSet;

use common::{arb_circuit, max_deviation, oracle_distribution, random_circuit};
use passelect::ir::{circuit_stats, validate, Circuit, DeviceModel, GateKind, Instruction};
use passelect::passes::{
    apply_dd, fuse_single_qubit, map_dense, map_noise_adaptive, map_sabre, map_trivial, route_basic, route_lookahead,
    route_sabre, route_stochastic, run_pipeline, schedule, Layout, Mapper, PassCombination, PassError, Router,
    SabreConfig, Scheduler,
};
use passelect::selector::{enumerate_combinations, SearchSpace};
use proptest::prelude::*;

fn line(n: usize) -> DeviceModel {
    DeviceModel::line(n, 0.01, 0.02).unwrap()
}

fn cx_only(n: usize, pairs: &[(usize, usize)]) -> Circuit {
    let mut c = Circuit::new(n, n);
    for &(a, b) in pairs {
        c.cx(a, b);
    }
    c.measure_all();
    c
}

fn image(l: &Layout) -> BTreeSet<usize> {
    l.as_slice().iter().copied().collect()
}

#[test]
fn trivial_layout() {
    let d = DeviceModel::heavy_hex_27();
    assert_eq!(map_trivial(&Circuit::new(3, 0), &d).unwrap().as_slice(), &[0, 1, 2]);
    assert_eq!(map_trivial(&Circuit::new(1, 0), &d).unwrap().as_slice(), &[0]);
    assert!(matches!(
        map_trivial(&Circuit::new(28, 0), &d),
        Err(PassError::CircuitTooLarge { needed: 28, available: 27 })
    ));
}

#[test]
fn dense_layout_picks_densest_subgraph() {
    let t = DeviceModel::uniform(4, &[(0, 1), (1, 2), (1, 3)], 0.01, 0.02).unwrap();
    let c = cx_only(3, &[(0, 1), (1, 2)]);
    let img = image(&map_dense(&c, &t).unwrap());
    // brute force: best 3-subsets by internal edge count
    let internal = |s: &BTreeSet<usize>| t.edges.iter().filter(|(a, b)| s.contains(a) && s.contains(b)).count();
    let best = (0..4usize)
        .flat_map(|a| (a + 1..4).flat_map(move |b| (b + 1..4).map(move |c| BTreeSet::from([a, b, c]))))
        .map(|s| internal(&s))
        .max()
        .unwrap();
    assert_eq!(internal(&img), best);
    assert!(img.contains(&1));
    let two = map_dense(&cx_only(2, &[(0, 1)]), &line(5)).unwrap();
    assert_eq!(image(&two), BTreeSet::from([0, 1]));
    let whole = map_dense(&cx_only(5, &[(0, 4)]), &line(5)).unwrap();
    assert_eq!(image(&whole).len(), 5);
}

#[test]
fn noise_adaptive_prefers_good_edges() {
    let mut d = line(3);
    d.cx_error.insert((0, 1), 0.05);
    d.cx_error.insert((1, 2), 0.01);
    let l = map_noise_adaptive(&cx_only(2, &[(0, 1)]), &d).unwrap();
    assert_eq!(image(&l), BTreeSet::from([1, 2]));

    let mut d = line(4);
    d.readout_error = vec![0.05, 0.01, 0.04, 0.02];
    let mut c = Circuit::new(2, 2);
    c.x(0).x(1).measure_all();
    let l = map_noise_adaptive(&c, &d).unwrap();
    assert_eq!(image(&l), BTreeSet::from([1, 3]));
}

#[test]
fn sabre_layout_finds_swap_free_embedding() {
    let d = line(6);
    // a path interaction graph embeds in the line
    let c = cx_only(4, &[(2, 0), (0, 3), (3, 1), (2, 0), (1, 3)]);
    let cfg = SabreConfig::default();
    let l = map_sabre(&c, &d, 3, &cfg).unwrap();
    assert_eq!(route_sabre(&c, &l, &d, 3, &cfg).unwrap().swaps, 0);
    assert_eq!(map_sabre(&c, &d, 3, &cfg).unwrap(), l);
    let single = map_sabre(&Circuit::new(1, 1), &d, 0, &cfg).unwrap();
    assert_eq!(single.len(), 1);
}

#[test]
fn basic_route_example() {
    let d = line(3);
    let c = cx_only(3, &[(0, 2)]);
    let l = Layout::new(vec![0, 1, 2], 3).unwrap();
    let r = route_basic(&c, &l, &d).unwrap();
    let gates: Vec<(GateKind, Vec<usize>)> = r
        .circuit
        .instructions
        .iter()
        .filter(|i| i.kind != GateKind::Measure)
        .map(|i| (i.kind, i.qubits.clone()))
        .collect();
    assert_eq!(
        gates,
        vec![(GateKind::SWAP, vec![0, 1]), (GateKind::CX, vec![1, 2]), (GateKind::SWAP, vec![0, 1])]
    );
    assert_eq!(r.swaps, 2);
    assert_eq!(r.final_v2p[..3], [0, 1, 2]);
    assert!(max_deviation(&oracle_distribution(&c), &oracle_distribution(&r.circuit)) <= 1e-12);
}

#[test]
fn basic_route_restores_positions_between_gates() {
    let d = line(4);
    let c = cx_only(4, &[(0, 3), (1, 3), (0, 2)]);
    let l = Layout::new(vec![0, 1, 2, 3], 4).unwrap();
    let r = route_basic(&c, &l, &d).unwrap();
    // replay swaps: every original CX must see the identity placement once its swaps are undone
    let mut pos: Vec<usize> = (0..4).collect();
    for inst in &r.circuit.instructions {
        match inst.kind {
            GateKind::SWAP => pos.swap(inst.qubits[0], inst.qubits[1]),
            GateKind::CX => assert!(d.is_coupled(inst.qubits[0], inst.qubits[1])),
            GateKind::Measure => assert_eq!(pos, vec![0, 1, 2, 3]),
            _ => {}
        }
    }
}

#[test]
fn adjacent_circuits_need_no_swaps() {
    let d = line(4);
    let c = cx_only(4, &[(0, 1), (1, 2), (2, 3), (1, 0)]);
    let l = Layout::new(vec![0, 1, 2, 3], 4).unwrap();
    let cfg = SabreConfig::default();
    assert_eq!(route_basic(&c, &l, &d).unwrap().swaps, 0);
    assert_eq!(route_stochastic(&c, &l, &d, 1, 64).unwrap().swaps, 0);
    assert_eq!(route_sabre(&c, &l, &d, 1, &cfg).unwrap().swaps, 0);
    assert_eq!(route_lookahead(&c, &l, &d, 20).unwrap().swaps, 0);
    let r = route_basic(&c, &l, &d).unwrap();
    assert!(r.circuit.same_operations(&{
        let mut x = c.clone();
        x.layout = r.circuit.layout.clone();
        x
    }));
}

#[test]
fn stochastic_route_is_seeded() {
    let d = line(5);
    let c = random_circuit(5, 40, false, false, 4);
    let l = Layout::new(vec![0, 1, 2, 3, 4], 5).unwrap();
    let a = route_stochastic(&c, &l, &d, 9, 64).unwrap();
    assert_eq!(a, route_stochastic(&c, &l, &d, 9, 64).unwrap());
    let far = cx_only(3, &[(0, 2)]);
    let r = route_stochastic(&far, &Layout::new(vec![0, 1, 2], 3).unwrap(), &line(3), 2, 64).unwrap();
    assert!(r.swaps >= 1);
    assert!(max_deviation(&oracle_distribution(&far), &oracle_distribution(&r.circuit)) <= 1e-12);
}

#[test]
fn sabre_beats_basic_on_most_random_circuits() {
    let d = line(5);
    let cfg = SabreConfig::default();
    let l = Layout::new(vec![0, 1, 2, 3, 4], 5).unwrap();
    let wins = (0..50u64)
        .filter(|&s| {
            let c = random_circuit(5, 40, false, false, 1000 + s);
            route_sabre(&c, &l, &d, s, &cfg).unwrap().swaps <= route_basic(&c, &l, &d).unwrap().swaps
        })
        .count();
    println!("sabre <= basic swaps in {wins}/50 instances");
    assert!(wins >= 40, "{wins}/50");
}

fn scheduled(c: &Circuit, d: &DeviceModel, policy: Scheduler) -> Circuit {
    let mut c = c.clone();
    c.layout = Some((0..c.num_qubits).collect());
    schedule(&c, d, policy).unwrap()
}

#[test]
fn schedule_examples() {
    let d = line(2);
    let mut c = Circuit::new(2, 0);
    c.sx(0).cx(0, 1);
    let s = scheduled(&c, &d, Scheduler::Asap);
    assert_eq!(s.instructions[1].start_time, Some(d.durations.single));
    let mut p = Circuit::new(2, 0);
    p.x(0).x(1);
    let s = scheduled(&p, &d, Scheduler::Asap);
    assert!(s.instructions.iter().all(|i| i.start_time == Some(0)));
    let mut late = Circuit::new(2, 0);
    late.x(0).cx(0, 1).cx(0, 1).x(1);
    let s = scheduled(&late, &d, Scheduler::Alap);
    let end = s.makespan();
    assert_eq!(end, scheduled(&late, &d, Scheduler::Asap).makespan());
    assert_eq!(s.instructions[3].start_time, Some(end - d.durations.single));
    let mut swap = Circuit::new(2, 0);
    swap.swap(0, 1);
    swap.layout = Some(vec![0, 1]);
    assert!(matches!(
        schedule(&swap, &d, Scheduler::Asap),
        Err(PassError::MissingDuration(GateKind::SWAP))
    ));
}

#[test]
fn dd_threshold() {
    let d = line(2);
    let gap = 2 * d.durations.single + 2;
    // qubit 0 waits exactly `gap` between its two gates
    let mut c = Circuit::new(2, 0);
    c.x(0).x(1);
    for _ in 0..gap {
        c.x(1);
    }
    c.cx(0, 1);
    let s = scheduled(&c, &d, Scheduler::Asap);
    let dd = apply_dd(&s, &d).unwrap();
    let added_x = dd.count(GateKind::X) - s.count(GateKind::X);
    assert_eq!(added_x, 2);
    assert_eq!(dd.count(GateKind::CX), s.count(GateKind::CX));
    let mut tight = Circuit::new(1, 0);
    tight.x(0).sx(0).x(0);
    let s = scheduled(&tight, &d, Scheduler::Asap);
    assert_eq!(apply_dd(&s, &d).unwrap(), s);
    let mut bare = Circuit::new(1, 0);
    bare.x(0);
    assert!(matches!(apply_dd(&bare, &d), Err(PassError::NotScheduled)));
}

#[test]
fn dd_keeps_ghz_distribution() {
    let d = DeviceModel::heavy_hex_27();
    let c = passelect::gen_benchmark(&"ghz5".parse().unwrap()).unwrap();
    let base: PassCombination = "sabre-sabre-alap".parse().unwrap();
    let with_dd = PassCombination { dd: true, ..base };
    let a = run_pipeline(&c, &d, &base, 3).unwrap();
    let b = run_pipeline(&c, &d, &with_dd, 3).unwrap();
    assert!(b.count(GateKind::X) > a.count(GateKind::X));
    assert_eq!(a.count(GateKind::CX), b.count(GateKind::CX));
    assert!(max_deviation(&oracle_distribution(&a), &oracle_distribution(&b)) <= 1e-12);
}

#[test]
fn fusion_examples() {
    let mut c = Circuit::new(1, 1);
    c.h(0).z(0).h(0).measure(0, 0);
    let f = fuse_single_qubit(&c);
    assert_eq!(f.instructions[0], Instruction::gate(GateKind::X, &[0]));
    assert_eq!(f.instructions.len(), 2);
}

#[test]
fn pipeline_examples() {
    let d = DeviceModel::heavy_hex_27();
    let bv4 = passelect::gen_benchmark(&"bv4".parse().unwrap()).unwrap();
    let p = PassCombination::default();
    assert_eq!(run_pipeline(&bv4, &d, &p, 7).unwrap(), run_pipeline(&bv4, &d, &p, 7).unwrap());
    for combo in enumerate_combinations(&SearchSpace::mapping_routing_scheduling()) {
        let t = PassCombination { trios: true, ..combo };
        assert_eq!(run_pipeline(&bv4, &d, &combo, 7).unwrap(), run_pipeline(&bv4, &d, &t, 7).unwrap());
    }
}

#[test]
fn trios_reduces_toffoli_cost_on_average() {
    let d = DeviceModel::heavy_hex_27();
    let c = passelect::gen_benchmark(&"cnx7".parse().unwrap()).unwrap();
    let (mut with, mut without) = (0, 0);
    for combo in enumerate_combinations(&SearchSpace::mapping_routing_scheduling()) {
        without += run_pipeline(&c, &d, &combo, 1).unwrap().count(GateKind::CX);
        with += run_pipeline(&c, &d, &PassCombination { trios: true, ..combo }, 1).unwrap().count(GateKind::CX);
    }
    println!("total CX over 18 combos: trios {with}, no trios {without}");
    assert!(with < without);
}

#[test]
fn lookahead_and_trivial_run() {
    let d = DeviceModel::heavy_hex_27();
    let c = passelect::gen_benchmark(&"adder6".parse().unwrap()).unwrap();
    let p = PassCombination::new(Mapper::Trivial, Router::Lookahead, Scheduler::Asap, true, true);
    assert!(!p.in_default_space());
    let out = run_pipeline(&c, &d, &p, 0).unwrap();
    assert!(validate(&out, &d).is_empty());
    assert!(max_deviation(&oracle_distribution(&c), &oracle_distribution(&out)) <= 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pipeline_preserves_semantics(c in arb_circuit(6, 30, false, true), combo in 0usize..72, seed in any::<u64>()) {
        let d = DeviceModel::heavy_hex_27();
        let p = enumerate_combinations(&SearchSpace::default())[combo];
        let out = run_pipeline(&c, &d, &p, seed).unwrap();
        prop_assert!(validate(&out, &d).is_empty());
        prop_assert!(out.is_scheduled());
        prop_assert!(max_deviation(&oracle_distribution(&c), &oracle_distribution(&out)) <= 1e-9);
    }

    #[test]
    fn routers_preserve_semantics(c in arb_circuit(5, 30, false, false), seed in any::<u64>()) {
        let d = line(6);
        let l = Layout::new([4, 0, 2, 5, 1][..c.num_qubits].to_vec(), 6).unwrap();
        let cfg = SabreConfig::default();
        let ideal = oracle_distribution(&c);
        for r in [
            route_basic(&c, &l, &d).unwrap(),
            route_stochastic(&c, &l, &d, seed, 64).unwrap(),
            route_sabre(&c, &l, &d, seed, &cfg).unwrap(),
            route_lookahead(&c, &l, &d, 20).unwrap(),
        ] {
            for inst in r.circuit.instructions.iter().filter(|i| i.qubits.len() == 2) {
                prop_assert!(d.is_coupled(inst.qubits[0], inst.qubits[1]));
            }
            prop_assert!(max_deviation(&ideal, &oracle_distribution(&r.circuit)) <= 1e-9);
        }
    }

    #[test]
    fn schedules_respect_dependencies(c in arb_circuit(5, 30, false, false), asap in any::<bool>()) {
        let d = DeviceModel::heavy_hex_27();
        let p = PassCombination { scheduler: if asap { Scheduler::Asap } else { Scheduler::Alap }, ..Default::default() };
        let out = run_pipeline(&c, &d, &p, 0).unwrap();
        let mut free = vec![0u64; d.num_qubits];
        for inst in &out.instructions {
            if inst.kind == GateKind::Barrier {
                continue;
            }
            let start = inst.start_time.unwrap();
            for &q in &inst.qubits {
                prop_assert!(start >= free[q]);
            }
            for &q in &inst.qubits {
                free[q] = inst.end_time().unwrap();
            }
        }
        let other = PassCombination { scheduler: if asap { Scheduler::Alap } else { Scheduler::Asap }, ..p };
        prop_assert_eq!(out.makespan(), run_pipeline(&c, &d, &other, 0).unwrap().makespan());
    }

    #[test]
    fn fusion_never_grows(c in arb_circuit(3, 40, false, false)) {
        let f = fuse_single_qubit(&c);
        let ones = |x: &Circuit| x.instructions.iter().filter(|i| i.kind.is_single_qubit_gate()).count();
        prop_assert!(ones(&f) <= ones(&c));
        prop_assert_eq!(f.count(GateKind::CX), c.count(GateKind::CX));
        prop_assert!(max_deviation(&oracle_distribution(&c), &oracle_distribution(&f)) <= 1e-9);
        prop_assert!(circuit_stats(&f).depth <= circuit_stats(&c).depth);
    }
}
