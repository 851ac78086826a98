mod common;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use common::{arb_circuit, as_map, max_deviation, oracle_distribution, random_circuit};
use passelect::clifford::{
    cliffordize, count_peaks, stabilizer_simulate, statevector_simulate, CliffordizeConfig, SimError,
};
use passelect::ir::{canonical_angle, quarter_turns, Circuit, DeviceModel, Distribution, GateKind};
use passelect::passes::{run_pipeline, PassCombination};
use proptest::prelude::*;

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = canonical_angle(a - b);
    d.min(std::f64::consts::TAU - d)
}

#[test]
fn stabilizer_matches_statevector_on_seeded_circuits() {
    for seed in 0..100u64 {
        let n = 1 + (seed % 8) as usize;
        let c = random_circuit(n, 60, true, false, seed);
        let stab = stabilizer_simulate(&c).unwrap();
        let sv = statevector_simulate(&c, 20).unwrap();
        assert!(stab.max_deviation(&sv) <= 1e-9, "seed {seed}");
        assert!(max_deviation(&as_map(&stab), &oracle_distribution(&c)) <= 1e-9, "seed {seed}");
    }
}

#[test]
fn textbook_distributions() {
    let mut ghz = Circuit::new(3, 3);
    ghz.h(0).cx(0, 1).cx(1, 2).measure_all();
    let d = stabilizer_simulate(&ghz).unwrap();
    assert_eq!(d, Distribution::from_pairs(3, [(0, 0.5), (7, 0.5)]));
    let mut x = Circuit::new(1, 1);
    x.x(0).measure(0, 0);
    assert_eq!(stabilizer_simulate(&x).unwrap(), Distribution::point(1, 1));
    let mut t = Circuit::new(1, 1);
    t.rz(FRAC_PI_4, 0).measure(0, 0);
    assert!(matches!(stabilizer_simulate(&t), Err(SimError::NonClifford { index: 0 })));
}

#[test]
fn peak_counts() {
    assert_eq!(count_peaks(&Distribution::from_pairs(3, [(0, 0.5), (7, 0.5)])), 2);
    assert_eq!(count_peaks(&Distribution::point(4, 11)), 1);
    assert_eq!(count_peaks(&Distribution::from_pairs(3, (0..8).map(|v| (v, 0.125)))), 8);
}

#[test]
fn statevector_refuses_wide_circuits() {
    let mut c = Circuit::new(21, 0);
    for q in 0..21 {
        c.sx(q);
    }
    assert!(matches!(statevector_simulate(&c, 20), Err(SimError::TooManyQubits { .. })));
}

fn transpiled_corpus() -> Vec<Circuit> {
    let d = DeviceModel::heavy_hex_27();
    let mut out = Vec::new();
    for spec in passelect::benchmarks::small_suite() {
        let c = passelect::gen_benchmark(&spec).unwrap();
        for combo in ["sabre-sabre-alap", "dense-stochastic-asap+trios+dd", "noise_adaptive-basic-alap+dd"] {
            let p: PassCombination = combo.parse().unwrap();
            out.push(run_pipeline(&c, &d, &p, 5).unwrap());
        }
    }
    out
}

#[test]
fn dummies_preserve_structure() {
    let cfg = CliffordizeConfig::default();
    for t in transpiled_corpus() {
        let target = count_peaks(&statevector_simulate(&t, 20).unwrap());
        let dummy = cliffordize(&t, target, &cfg).unwrap();
        assert_eq!(dummy.circuit.instructions.len(), t.instructions.len());
        for (a, b) in dummy.circuit.instructions.iter().zip(&t.instructions) {
            assert_eq!((a.kind, &a.qubits, a.clbit, a.start_time), (b.kind, &b.qubits, b.clbit, b.start_time));
            if a.kind == GateKind::RZ {
                let (na, ob) = (a.param.unwrap(), b.param.unwrap());
                assert!(quarter_turns(na).is_some(), "angle {na}");
                assert!(angle_gap(na, ob) <= FRAC_PI_4 + PI / 100.0 + 1e-12);
            }
        }
        assert_eq!(
            passelect::ir::circuit_stats(&dummy.circuit).depth,
            passelect::ir::circuit_stats(&t).depth
        );
        assert_eq!(count_peaks(&stabilizer_simulate(&dummy.circuit).unwrap()), dummy.peaks);
        assert!(dummy.attempts >= 1 && dummy.attempts <= cfg.max_attempts);
        assert_eq!(cliffordize(&t, target, &cfg).unwrap(), dummy);
    }
}

#[test]
fn clifford_input_is_a_fixed_point() {
    let mut c = random_circuit(4, 30, true, false, 9);
    c.instructions.retain(|i| matches!(i.kind, GateKind::RZ | GateKind::CX | GateKind::SX | GateKind::X | GateKind::Measure));
    let d = cliffordize(&c, 1, &CliffordizeConfig::default()).unwrap();
    assert!(d.circuit.same_operations(&c));
    assert_eq!(d.attempts, 1);
}

#[test]
fn nearest_rounding_example() {
    let mut c = Circuit::new(1, 1);
    c.rz(PI / 3.0, 0).measure(0, 0);
    let d = cliffordize(&c, 1, &CliffordizeConfig::default()).unwrap();
    assert!((d.circuit.instructions[0].param.unwrap() - FRAC_PI_2).abs() < 1e-12);
}

#[test]
fn band_angles_vary_across_attempts() {
    // H RZ(π/4) H gives one peak for RZ(0) and two for RZ(π/2); asking for
    // two peaks must land on the upper rounding within a few attempts
    let mut c = Circuit::new(1, 1);
    c.sx(0).rz(FRAC_PI_4, 0).sx(0).measure(0, 0);
    let mut seen = std::collections::BTreeSet::new();
    for seed in 0..20 {
        let cfg = CliffordizeConfig {
            seed,
            max_attempts: 1,
            ..Default::default()
        };
        let d = cliffordize(&c, 1, &cfg).unwrap();
        seen.insert(quarter_turns(d.circuit.instructions[1].param.unwrap()).unwrap());
    }
    assert_eq!(seen.into_iter().collect::<Vec<_>>(), vec![0, 1]);
    for target in [1, 2] {
        let d = cliffordize(&c, target, &CliffordizeConfig::default()).unwrap();
        assert_eq!(d.peaks, target);
    }
}

#[test]
fn rejects_non_basis_gates() {
    let mut c = Circuit::new(1, 1);
    c.h(0).measure(0, 0);
    assert!(matches!(
        cliffordize(&c, 1, &CliffordizeConfig::default()),
        Err(SimError::NonBasisGate(GateKind::H))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn stabilizer_equals_statevector(c in arb_circuit(8, 60, true, false)) {
        let stab = stabilizer_simulate(&c).unwrap();
        prop_assert!(stab.max_deviation(&statevector_simulate(&c, 20).unwrap()) <= 1e-9);
        let probs: Vec<f64> = stab.probs.values().copied().collect();
        prop_assert!(probs.iter().all(|p| (p - probs[0]).abs() < 1e-12));
        prop_assert!((stab.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dummy_angles_stay_close(seed in any::<u64>(), n in 1usize..6) {
        let mut c = random_circuit(n, 40, false, false, seed);
        // restrict to the dummy's input basis
        c.instructions.retain(|i| matches!(i.kind, GateKind::RZ | GateKind::CX | GateKind::SX | GateKind::X | GateKind::Measure));
        let d = cliffordize(&c, 1, &CliffordizeConfig { seed, ..Default::default() }).unwrap();
        for (a, b) in d.circuit.instructions.iter().zip(&c.instructions) {
            prop_assert_eq!(a.kind, b.kind);
            if a.kind == GateKind::RZ {
                prop_assert!(quarter_turns(a.param.unwrap()).is_some());
                prop_assert!(angle_gap(a.param.unwrap(), b.param.unwrap()) <= FRAC_PI_4 + PI / 100.0 + 1e-12);
            }
        }
    }
}
