use std::collections::BTreeSet;

use passelect::emulator::{esp_predict, NoiseParams, Scenario};
use passelect::ir::{Circuit, Counts, DeviceModel, Distribution};
use passelect::passes::{run_pipeline, PassCombination};
use passelect::selector::{
    compare_methods, correlation, enumerate_combinations, esp_rank, fidelity_relative_to_oracle, optran, optran_e,
    oracle_search, pst, select, shot_budget, Method, SearchSpace, SelectOptions, Stage, CSV_COLUMNS,
};
use passelect::{gen_benchmark, BenchmarkSpec};
use proptest::prelude::*;

fn bench(name: &str) -> Circuit {
    gen_benchmark(&name.parse::<BenchmarkSpec>().unwrap()).unwrap()
}

fn biased(d: &DeviceModel) -> NoiseParams {
    Scenario::biased(d).noise_params(d)
}

#[test]
fn combination_counts() {
    let full = SearchSpace::default();
    assert_eq!(enumerate_combinations(&full).len(), 72);
    assert_eq!(full.size(), 72);
    assert_eq!(enumerate_combinations(&SearchSpace::mapping_routing_scheduling()).len(), 18);
    let tiny = SearchSpace {
        stages: vec![Stage::Dd(vec![false, true])],
        chunking: vec![1],
        k: 1,
    };
    assert_eq!(enumerate_combinations(&tiny).len(), 2);
    let combos = enumerate_combinations(&full);
    assert_eq!(combos.iter().collect::<BTreeSet<_>>().len(), 72);
    // dd varies fastest, mapper slowest
    assert!(!combos[0].dd && combos[1].dd);
    assert_eq!(combos[0].mapper, combos[23].mapper);
    assert_ne!(combos[23].mapper, combos[24].mapper);
    for (i, c) in combos.iter().enumerate() {
        assert_eq!(full.index_of(c), Some(i));
    }
}

#[test]
fn pst_examples() {
    let ideal = Distribution::from_pairs(2, [(0, 0.5), (3, 0.5)]);
    let c = Counts::from_strings(2, [("00", 40), ("11", 40), ("01", 10), ("10", 10)]).unwrap();
    assert!((pst(&c, &ideal).unwrap() - 0.8).abs() < 1e-12);
    let inside = Counts::from_strings(2, [("00", 7), ("11", 3)]).unwrap();
    assert_eq!(pst(&inside, &ideal).unwrap(), 1.0);
    let outside = Counts::from_strings(2, [("01", 7)]).unwrap();
    assert_eq!(pst(&outside, &ideal).unwrap(), 0.0);
    assert!(pst(&Counts::new(2), &ideal).is_err());
    assert!(pst(&Counts::new(3), &ideal).is_err());
}

#[test]
fn shot_budget_examples() {
    assert_eq!(shot_budget(&Distribution::point(4, 5), 200), 200);
    assert_eq!(shot_budget(&Distribution::from_pairs(3, [(0, 0.5), (7, 0.5)]), 200), 400);
    assert!((72.0f64 * 200.0 / 8192.0 - 1.7578).abs() < 1e-4);
}

#[test]
fn relative_fidelity_examples() {
    assert_eq!(fidelity_relative_to_oracle(0.7, 0.7).unwrap().value, 1.0);
    assert!((fidelity_relative_to_oracle(0.4, 0.8).unwrap().value - 0.5).abs() < 1e-12);
    let over = fidelity_relative_to_oracle(0.82, 0.8).unwrap();
    assert_eq!(over.value, 1.0);
    assert!((over.raw - 1.025).abs() < 1e-12);
    assert!(fidelity_relative_to_oracle(0.5, 0.0).is_err());
}

#[test]
fn correlation_examples() {
    let xs = [0.1, 0.5, 0.3, 0.9];
    assert!((correlation(&xs, &xs).unwrap() - 100.0).abs() < 1e-9);
    let ys: Vec<f64> = xs.iter().map(|x| 2.0 - x).collect();
    assert!((correlation(&xs, &ys).unwrap() + 100.0).abs() < 1e-9);
    assert!(correlation(&xs[..2], &xs[..2]).is_err());
    assert!(correlation(&[1.0, 1.0, 1.0], &xs[..3]).is_err());
}

#[test]
fn evaluated_counts_and_cost_reduction() {
    let d = DeviceModel::heavy_hex_27();
    let np = biased(&d);
    let c = bench("bv4");
    let space = SearchSpace::default();
    let methods = [Method::Optran, Method::OptranE { k: 1 }, Method::OptranE { k: 3 }];
    let reports = compare_methods(&c, &d, &np, &space, &methods, &SelectOptions::default()).unwrap();
    let evaluated: Vec<usize> = reports.iter().map(|r| r.evaluated).collect();
    assert_eq!(evaluated, [72, 22, 30]);
    let reduction = |n: usize| (1.0 - n as f64 / 72.0) * 100.0;
    assert_eq!(format!("{:.2}", reduction(22)), "69.44");
    assert_eq!(format!("{:.2}", reduction(30)), "58.33");
    for r in &reports {
        assert_eq!(r.total_shots, r.records.iter().map(|x| x.shots).sum::<u64>());
        assert!(r.records.iter().all(|x| x.shots == 200 && x.peaks == Some(1)));
        assert_eq!(r.target_peaks, 1);
    }
    assert_eq!(reports[0].total_shots, 14_400);
    assert_eq!(reports[1].total_shots, 22 * 200);
    // chunk 1 covers the 18 settings with both optimizations off
    let e1 = &reports[1];
    assert!(e1.records[..18].iter().all(|r| r.chunk == 0 && !r.combo.trios && !r.combo.dd));
    let survivor = &e1.records[18].combo;
    assert!(e1.records[18..]
        .iter()
        .all(|r| r.chunk == 1 && (r.combo.mapper, r.combo.router, r.combo.scheduler)
            == (survivor.mapper, survivor.router, survivor.scheduler)));
    // exhaustive search can only do better on the proxy score
    assert!(reports[0].chosen_dummy_pst >= e1.chosen_dummy_pst);
    assert!(reports[0].chosen_dummy_pst >= reports[2].chosen_dummy_pst);
}

#[test]
fn without_shot_reduction_every_proxy_gets_the_baseline() {
    let d = DeviceModel::heavy_hex_27();
    let opts = SelectOptions {
        shot_reduction: false,
        run_final: false,
        ..Default::default()
    };
    let r = optran(&bench("ghz3"), &d, &biased(&d), &SearchSpace::default(), &opts).unwrap();
    assert_eq!(r.total_shots, 72 * 8192);
    assert_eq!(r.shot_overhead, 72.0);
    assert!(r.records.iter().all(|x| x.shots == 8192));
    assert!(r.final_result.pst.is_none());
}

#[test]
fn exhaustive_k_matches_optran() {
    let d = DeviceModel::heavy_hex_27();
    let np = biased(&d);
    let c = bench("ghz4");
    let space = SearchSpace::default();
    let opts = SelectOptions::default();
    let full = optran(&c, &d, &np, &space, &opts).unwrap();
    let e18 = optran_e(&c, &d, &np, &space, 18, &opts).unwrap();
    let set = |r: &passelect::selector::SelectionReport| r.records.iter().map(|x| x.index).collect::<BTreeSet<_>>();
    assert_eq!(set(&full), set(&e18));
    assert_eq!(e18.evaluated, 18 + 4 * 18);
    assert_eq!(full.chosen, e18.chosen);
    assert_eq!(full.chosen_dummy_pst, e18.chosen_dummy_pst);
}

#[test]
fn noiseless_ties_go_to_the_first_combination() {
    let d = DeviceModel::heavy_hex_27();
    let np = NoiseParams::noiseless(&d);
    let c = bench("ghz4");
    let opts = SelectOptions {
        oracle: true,
        ..Default::default()
    };
    let r = select(&c, &d, &np, &SearchSpace::default(), Method::Optran, &opts).unwrap();
    assert!(r.records.iter().all(|x| x.dummy_pst == Some(1.0)));
    assert_eq!(r.chosen_index, 0);
    assert_eq!(r.chosen, enumerate_combinations(&SearchSpace::default())[0]);
    let o = oracle_search(&c, &d, &np, &SearchSpace::default(), 2000, 3, 0).unwrap();
    assert_eq!(o.best_index, 0);
    assert!(o.per_combo.iter().all(|(_, p)| *p == Some(1.0)));
    assert_eq!(r.oracle.unwrap().selected.value, 1.0);
}

#[test]
fn full_support_outputs_always_succeed() {
    let d = DeviceModel::heavy_hex_27();
    let np = Scenario::seeded_drift(&d, 4).noise_params(&d);
    let c = bench("qaoa4");
    let opts = SelectOptions {
        oracle: true,
        noise_model_baseline: true,
        ..Default::default()
    };
    let r = select(&c, &d, &np, &SearchSpace::default(), Method::OptranE { k: 1 }, &opts).unwrap();
    assert_eq!(r.target_peaks, 16);
    let o = r.oracle.unwrap();
    assert!(o.per_combo.iter().all(|p| *p == Some(1.0)));
    assert_eq!(r.final_result.pst, Some(1.0));
    assert!(r.records.iter().all(|x| x.noise_model_pst == Some(1.0)));
}

#[test]
fn oracle_avoids_poisoned_edge() {
    let d = DeviceModel::heavy_hex_27();
    let mut c = Circuit::new(2, 2);
    c.x(0);
    for _ in 0..6 {
        c.cx(0, 1);
    }
    c.measure_all();
    let space = SearchSpace::mapping_routing_scheduling();
    let np = Scenario::biased(&d).noise_params(&d);
    let (a, b) = Scenario::biased(&d).hot_edge.unwrap();
    let uses_hot = |p: &PassCombination| {
        let t = run_pipeline(&c, &d, p, 5).unwrap();
        t.instructions.iter().any(|i| {
            i.qubits.len() == 2 && (i.qubits[0].min(i.qubits[1]), i.qubits[0].max(i.qubits[1])) == (a, b)
        })
    };
    let combos = enumerate_combinations(&space);
    assert!(combos.iter().any(|p| uses_hot(p)), "some layout should land on the hot edge");
    assert!(combos.iter().any(|p| !uses_hot(p)));
    let o = oracle_search(&c, &d, &np, &space, 8192, 5, 0).unwrap();
    assert!(!uses_hot(&o.best));
    assert_eq!(o, oracle_search(&c, &d, &np, &space, 8192, 5, 0).unwrap());
}

#[test]
fn esp_rank_orders_by_cx_count_under_uniform_rates() {
    let mut d = DeviceModel::heavy_hex_27();
    for p in d.cx_error.values_mut() {
        *p = 0.01;
    }
    d.readout_error = vec![0.02; d.num_qubits];
    d.t1 = vec![1e12; d.num_qubits];
    d.t2 = vec![1e12; d.num_qubits];
    let c = bench("adder4");
    let space = SearchSpace::mapping_routing_scheduling();
    let ranked = esp_rank(&c, &d, &space, 0).unwrap();
    assert_eq!(ranked.len(), 18);
    let cx: Vec<usize> = ranked
        .iter()
        .map(|(p, _)| run_pipeline(&c, &d, p, 0).unwrap().count(passelect::ir::GateKind::CX))
        .collect();
    assert!(cx.windows(2).all(|w| w[0] <= w[1]), "{cx:?}");
    for ((p, e), n) in ranked.iter().zip(&cx) {
        let closed = 0.99f64.powi(*n as i32) * 0.98f64.powi(c.num_clbits as i32);
        assert!((e - closed).abs() < 1e-6, "{p}: {e} vs {closed}");
        let t = run_pipeline(&c, &d, p, 0).unwrap();
        assert_eq!(*e, esp_predict(&t, &d));
    }
    // equal scores keep combination order
    let index = |p: &PassCombination| space.index_of(p).unwrap();
    for w in ranked.windows(2) {
        if w[0].1 == w[1].1 {
            assert!(index(&w[0].0) < index(&w[1].0));
        }
    }
    let empty = esp_rank(&Circuit::new(2, 0), &d, &space, 0).unwrap();
    assert!(empty.iter().all(|(_, e)| *e == 1.0));
}

#[test]
fn reports_are_deterministic_and_tabular() {
    let d = DeviceModel::heavy_hex_27();
    let np = biased(&d);
    let c = bench("bv5");
    let opts = SelectOptions {
        seed: 42,
        oracle: true,
        noise_model_baseline: true,
        ..Default::default()
    };
    let space = SearchSpace::default();
    let a = optran_e(&c, &d, &np, &space, 1, &opts).unwrap();
    let b = optran_e(&c, &d, &np, &space, 1, &opts).unwrap();
    assert_eq!(a.to_json_without_timings(), b.to_json_without_timings());
    assert_eq!(a.to_csv(), b.to_csv());
    let csv = a.to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_COLUMNS.join(","));
    assert_eq!(lines.len(), 1 + a.evaluated);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == CSV_COLUMNS.len()));
    let o = a.oracle.as_ref().unwrap();
    assert_eq!(o.per_combo.len(), 72);
    assert!(o.best_pst >= o.per_combo.iter().flatten().cloned().fold(0.0, f64::max));
    assert!(a.baselines.noise_model_pick.is_some());
    assert_eq!(a.baselines.esp_ranking.len(), 72);
    let other = optran_e(&c, &d, &np, &space, 1, &SelectOptions { seed: 43, ..opts }).unwrap();
    assert_ne!(a.to_json_without_timings(), other.to_json_without_timings());
}

#[test]
fn shared_evaluation_matches_standalone() {
    let d = DeviceModel::heavy_hex_27();
    let np = biased(&d);
    let c = bench("ghz3");
    let space = SearchSpace::default();
    let opts = SelectOptions::default();
    let shared = compare_methods(&c, &d, &np, &space, &[Method::Optran, Method::OptranE { k: 2 }], &opts).unwrap();
    let alone = optran_e(&c, &d, &np, &space, 2, &opts).unwrap();
    assert_eq!(shared[1].to_json_without_timings(), alone.to_json_without_timings());
}

#[test]
fn invalid_spaces_are_rejected() {
    let d = DeviceModel::heavy_hex_27();
    let np = biased(&d);
    let c = bench("ghz3");
    let bad = SearchSpace {
        chunking: vec![2, 2],
        ..SearchSpace::default()
    };
    assert!(optran(&c, &d, &np, &bad, &SelectOptions::default()).is_err());
    assert!(optran_e(&c, &d, &np, &SearchSpace::default(), 0, &SelectOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn chosen_maximizes_proxy_score(seed in any::<u64>(), k in 1usize..4) {
        let d = DeviceModel::heavy_hex_27();
        let np = biased(&d);
        let c = bench("ghz3");
        let opts = SelectOptions { seed, ..Default::default() };
        let r = optran_e(&c, &d, &np, &SearchSpace::default(), k, &opts).unwrap();
        prop_assert_eq!(r.evaluated, 18 + 4 * k);
        let last: Vec<_> = r.records.iter().filter(|x| x.chunk == 1).collect();
        let best = last.iter().filter_map(|x| x.dummy_pst).fold(0.0, f64::max);
        prop_assert_eq!(r.chosen_dummy_pst, best);
        let first = last.iter().filter(|x| x.dummy_pst == Some(best)).map(|x| x.index).min().unwrap();
        prop_assert_eq!(r.chosen_index, first);
    }
}
