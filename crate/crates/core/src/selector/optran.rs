use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clifford::{
    cliffordize, count_peaks, stabilizer_simulate, statevector_simulate, CliffordizeConfig, MAX_STATEVECTOR_QUBITS,
};
use crate::emulator::{esp_predict, execute, noise_model_predict, NoiseParams};
use crate::ir::{circuit_stats, Circuit, CircuitStats, DeviceModel, Distribution};
use crate::passes::{run_pipeline_with, PassCombination, PassConfig};
use crate::rng;

use super::metrics::{fidelity_relative_to_oracle, pst, shot_budget};
use super::report::{
    Baselines, ComboRecord, FinalResult, OracleComparison, SelectionReport, Timings, SCHEMA_VERSION,
};
use super::space::{enumerate_combinations, SearchSpace};
use super::SelectorError;

/// Search strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "method")]
pub enum Method {
    /// Evaluate every combination.
    Optran,
    /// Chunked search carrying the top `k` partial choices between chunks.
    OptranE { k: usize },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Optran => "optran",
            Method::OptranE { .. } => "optran-e",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectOptions {
    /// Budget proxy shots by peak count instead of a fixed shot count.
    pub shot_reduction: bool,
    pub shots_per_peak: u64,
    /// Shots of one ordinary execution.
    pub shots: u64,
    pub seed: u64,
    pub epoch: usize,
    /// Peak count of the original's ideal output, when it cannot be simulated.
    pub target_peaks: Option<u64>,
    pub delta: f64,
    pub max_attempts: usize,
    pub passes: PassConfig,
    /// Execute the chosen variant of the original circuit.
    pub run_final: bool,
    /// Also execute the original circuit under every combination.
    pub oracle: bool,
    /// Also rank combinations by the calibration-driven noise model.
    pub noise_model_baseline: bool,
}

impl Default for SelectOptions {
    fn default() -> Self {
        let cc = CliffordizeConfig::default();
        SelectOptions {
            shot_reduction: true,
            shots_per_peak: 200,
            shots: 8192,
            seed: 0,
            epoch: 0,
            target_peaks: None,
            delta: cc.delta,
            max_attempts: cc.max_attempts,
            passes: PassConfig::default(),
            run_final: true,
            oracle: false,
            noise_model_baseline: false,
        }
    }
}

const STREAM_DUMMY: u64 = 0x6475_6d6d;
const STREAM_PROXY_RUN: u64 = 0x7072_6f78;
const STREAM_ORIGINAL_RUN: u64 = 0x6f72_6967;
const STREAM_MODEL_RUN: u64 = 0x6d6f_646c;

struct Variant {
    circuit: Result<Circuit, String>,
    elapsed: Duration,
}

#[derive(Clone)]
struct ProxyResult {
    stats: CircuitStats,
    attempts: usize,
    peaks: u64,
    shots: u64,
    pst: f64,
    dummy_time: Duration,
    run_time: Duration,
}

/// Every outcome is in the support, so any execution scores PST 1.
fn full_support(ideal: &Distribution) -> bool {
    ideal.width < 64 && count_peaks(ideal) == 1u64 << ideal.width
}

/// Shared, lazily filled per-combination results.
struct Evaluator<'a> {
    c: &'a Circuit,
    d: &'a DeviceModel,
    np: &'a NoiseParams,
    opts: &'a SelectOptions,
    combos: Vec<PassCombination>,
    ideal: Option<Distribution>,
    target_peaks: Option<u64>,
    variants: Vec<OnceLock<Variant>>,
    proxies: Vec<OnceLock<Result<ProxyResult, String>>>,
    originals: Vec<OnceLock<Option<(f64, Duration)>>>,
    models: Vec<OnceLock<Option<f64>>>,
}

impl<'a> Evaluator<'a> {
    fn new(
        c: &'a Circuit,
        d: &'a DeviceModel,
        np: &'a NoiseParams,
        space: &SearchSpace,
        opts: &'a SelectOptions,
    ) -> Result<Self, SelectorError> {
        space.check()?;
        c.check().map_err(crate::passes::PassError::from)?;
        let ideal = if c.active_qubits().len() <= MAX_STATEVECTOR_QUBITS {
            Some(statevector_simulate(c, MAX_STATEVECTOR_QUBITS)?)
        } else {
            None
        };
        let target_peaks = opts.target_peaks.or(ideal.as_ref().map(count_peaks));
        let combos = enumerate_combinations(space);
        let n = combos.len();
        Ok(Evaluator {
            c,
            d,
            np,
            opts,
            combos,
            ideal,
            target_peaks,
            variants: (0..n).map(|_| OnceLock::new()).collect(),
            proxies: (0..n).map(|_| OnceLock::new()).collect(),
            originals: (0..n).map(|_| OnceLock::new()).collect(),
            models: (0..n).map(|_| OnceLock::new()).collect(),
        })
    }

    fn variant(&self, i: usize) -> &Variant {
        self.variants[i].get_or_init(|| {
            let t = Instant::now();
            let circuit = run_pipeline_with(self.c, self.d, &self.combos[i], self.opts.seed, &self.opts.passes)
                .map_err(|e| e.to_string());
            Variant {
                circuit,
                elapsed: t.elapsed(),
            }
        })
    }

    fn transpiled(&self, i: usize) -> Result<&Circuit, String> {
        self.variant(i).circuit.as_ref().map_err(Clone::clone)
    }

    fn proxy(&self, i: usize) -> &Result<ProxyResult, String> {
        self.proxies[i].get_or_init(|| {
            let circuit = self.transpiled(i)?;
            let target = self.target_peaks.ok_or_else(|| SelectorError::TargetPeaksUnknown.to_string())?;
            let t = Instant::now();
            let cfg = CliffordizeConfig {
                delta: self.opts.delta,
                max_attempts: self.opts.max_attempts,
                seed: rng::derive(self.opts.seed, STREAM_DUMMY, i as u64),
            };
            let dummy = cliffordize(circuit, target, &cfg).map_err(|e| e.to_string())?;
            let ideal = stabilizer_simulate(&dummy.circuit).map_err(|e| e.to_string())?;
            let dummy_time = t.elapsed();
            let shots = if self.opts.shot_reduction {
                shot_budget(&ideal, self.opts.shots_per_peak)
            } else {
                self.opts.shots
            };
            let t = Instant::now();
            let seed = rng::derive(self.opts.seed, STREAM_PROXY_RUN, i as u64);
            let counts = execute(&dummy.circuit, self.d, self.np, shots, seed, self.opts.epoch).map_err(|e| e.to_string())?;
            let pst = pst(&counts, &ideal).map_err(|e| e.to_string())?;
            Ok(ProxyResult {
                stats: circuit_stats(&dummy.circuit),
                attempts: dummy.attempts,
                peaks: dummy.peaks,
                shots,
                pst,
                dummy_time,
                run_time: t.elapsed(),
            })
        })
    }

    /// PST of the original circuit under combination `i` on the emulator.
    fn original(&self, i: usize) -> Option<f64> {
        self.originals[i]
            .get_or_init(|| {
                let ideal = self.ideal.as_ref()?;
                let circuit = self.transpiled(i).ok()?;
                let t = Instant::now();
                if full_support(ideal) {
                    return Some((1.0, t.elapsed()));
                }
                let seed = rng::derive(self.opts.seed, STREAM_ORIGINAL_RUN, i as u64);
                let counts = execute(circuit, self.d, self.np, self.opts.shots, seed, self.opts.epoch).ok()?;
                Some((pst(&counts, ideal).ok()?, t.elapsed()))
            })
            .map(|(p, _)| p)
    }

    fn model(&self, i: usize) -> Option<f64> {
        *self.models[i].get_or_init(|| {
            let ideal = self.ideal.as_ref()?;
            let circuit = self.transpiled(i).ok()?;
            if full_support(ideal) {
                return Some(1.0);
            }
            let seed = rng::derive(self.opts.seed, STREAM_MODEL_RUN, i as u64);
            let counts = noise_model_predict(circuit, self.d, self.opts.shots, seed).ok()?;
            pst(&counts, ideal).ok()
        })
    }

    fn esp(&self, i: usize) -> Option<f64> {
        self.transpiled(i).ok().map(|c| esp_predict(c, self.d))
    }

    fn record(&self, i: usize, chunk: usize) -> ComboRecord {
        let proxy = self.proxy(i);
        let transpiled = self.transpiled(i).ok().map(circuit_stats);
        let (error, dummy, attempts, peaks, shots, dummy_pst) = match proxy {
            Ok(p) => (None, Some(p.stats), Some(p.attempts), Some(p.peaks), p.shots, Some(p.pst)),
            Err(e) => (Some(e.clone()), None, None, None, 0, None),
        };
        ComboRecord {
            index: i,
            combo: self.combos[i],
            chunk,
            error,
            transpiled,
            dummy,
            dummy_attempts: attempts,
            peaks,
            shots,
            dummy_pst,
            esp: self.esp(i),
            noise_model_pst: self.models[i].get().copied().flatten(),
            oracle_pst: self.originals[i].get().copied().flatten().map(|(p, _)| p),
        }
    }

    fn evaluate(&self, indices: &[usize]) {
        indices.par_iter().for_each(|&i| {
            let _ = self.proxy(i);
        });
    }

    fn all_indices(&self) -> Vec<usize> {
        (0..self.combos.len()).collect()
    }
}

/// Best index by score, ties to the lowest index.
fn argmax(scored: impl IntoIterator<Item = (usize, f64)>) -> Option<(usize, f64)> {
    scored.into_iter().fold(None, |best, (i, s)| match best {
        Some((bi, bs)) if bs > s || (bs == s && bi < i) => Some((bi, bs)),
        _ => Some((i, s)),
    })
}

/// Combination indices ordered by ESP of their transpiled variants, descending.
fn esp_ranking(ev: &Evaluator) -> Vec<(usize, f64)> {
    let idx = ev.all_indices();
    let esps: Vec<Option<f64>> = idx.par_iter().map(|&i| ev.esp(i)).collect();
    let mut ranked: Vec<(usize, f64)> = idx.into_iter().zip(esps).filter_map(|(i, e)| e.map(|e| (i, e))).collect();
    ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    ranked
}

/// Rank every combination of `space` by the ESP of its transpiled variant.
pub fn esp_rank(
    c: &Circuit,
    d: &DeviceModel,
    space: &SearchSpace,
    seed: u64,
) -> Result<Vec<(PassCombination, f64)>, SelectorError> {
    let opts = SelectOptions {
        seed,
        ..Default::default()
    };
    let np = NoiseParams::noiseless(d);
    let ev = Evaluator::new(c, d, &np, space, &opts)?;
    Ok(esp_ranking(&ev).into_iter().map(|(i, e)| (ev.combos[i], e)).collect())
}

/// Result of executing the original circuit under every combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub best: PassCombination,
    pub best_index: usize,
    pub best_pst: f64,
    pub per_combo: Vec<(PassCombination, Option<f64>)>,
}

fn oracle_of(ev: &Evaluator) -> Result<OracleResult, SelectorError> {
    if ev.ideal.is_none() {
        return Err(SelectorError::OracleUnavailable(ev.c.active_qubits().len()));
    }
    let idx = ev.all_indices();
    let psts: Vec<Option<f64>> = idx.par_iter().map(|&i| ev.original(i)).collect();
    let (best_index, best_pst) = argmax(psts.iter().enumerate().filter_map(|(i, p)| p.map(|p| (i, p))))
        .ok_or(SelectorError::NoViableCombination)?;
    Ok(OracleResult {
        best: ev.combos[best_index],
        best_index,
        best_pst,
        per_combo: ev.combos.iter().copied().zip(psts).collect(),
    })
}

/// Execute the original circuit under every combination and return the best.
pub fn oracle_search(
    c: &Circuit,
    d: &DeviceModel,
    np: &NoiseParams,
    space: &SearchSpace,
    shots: u64,
    seed: u64,
    epoch: usize,
) -> Result<OracleResult, SelectorError> {
    let opts = SelectOptions {
        shots,
        seed,
        epoch,
        ..Default::default()
    };
    let ev = Evaluator::new(c, d, np, space, &opts)?;
    oracle_of(&ev)
}

/// Exhaustive proxy-driven selection.
pub fn optran(
    c: &Circuit,
    d: &DeviceModel,
    np: &NoiseParams,
    space: &SearchSpace,
    opts: &SelectOptions,
) -> Result<SelectionReport, SelectorError> {
    select(c, d, np, space, Method::Optran, opts)
}

/// Chunked top-`k` proxy-driven selection.
pub fn optran_e(
    c: &Circuit,
    d: &DeviceModel,
    np: &NoiseParams,
    space: &SearchSpace,
    k: usize,
    opts: &SelectOptions,
) -> Result<SelectionReport, SelectorError> {
    select(c, d, np, space, Method::OptranE { k }, opts)
}

/// Run a selection method and assemble the report with its baselines.
pub fn select(
    c: &Circuit,
    d: &DeviceModel,
    np: &NoiseParams,
    space: &SearchSpace,
    method: Method,
    opts: &SelectOptions,
) -> Result<SelectionReport, SelectorError> {
    let started = Instant::now();
    let ev = Evaluator::new(c, d, np, space, opts)?;
    select_with(&ev, space, method, started)
}

/// Run several methods over one shared set of per-combination evaluations.
///
/// Each report equals the one [`select`] produces on its own, timings aside.
pub fn compare_methods(
    c: &Circuit,
    d: &DeviceModel,
    np: &NoiseParams,
    space: &SearchSpace,
    methods: &[Method],
    opts: &SelectOptions,
) -> Result<Vec<SelectionReport>, SelectorError> {
    let ev = Evaluator::new(c, d, np, space, opts)?;
    methods
        .iter()
        .map(|&m| select_with(&ev, space, m, Instant::now()))
        .collect()
}

fn select_with(
    ev: &Evaluator,
    space: &SearchSpace,
    method: Method,
    started: Instant,
) -> Result<SelectionReport, SelectorError> {
    let (d, opts) = (ev.d, ev.opts);
    if ev.target_peaks.is_none() {
        return Err(SelectorError::TargetPeaksUnknown);
    }
    let proxy_score = |i: usize| ev.proxy(i).as_ref().ok().map(|p| (i, p.pst));
    let mut records = Vec::new();
    let chosen = match method {
        Method::Optran => {
            let all = ev.all_indices();
            ev.evaluate(&all);
            records.extend(all.iter().map(|&i| ev.record(i, 0)));
            argmax(all.iter().filter_map(|&i| proxy_score(i)))
        }
        Method::OptranE { k } => {
            if k == 0 {
                return Err(SelectorError::Space("k must be at least 1".into()));
            }
            let chunks = space.chunks();
            let mut survivors = vec![vec![0usize; space.stages.len()]];
            let mut best = None;
            for (j, range) in chunks.iter().enumerate() {
                let mut cands = Vec::new();
                for s in &survivors {
                    let sub = SearchSpace {
                        stages: space.stages[range.clone()].to_vec(),
                        chunking: vec![range.len()],
                        k: 1,
                    };
                    for local in 0..sub.size() {
                        let mut choice = s.clone();
                        choice[range.clone()].copy_from_slice(&sub.choice(local));
                        cands.push(space.index(&choice));
                    }
                }
                ev.evaluate(&cands);
                records.extend(cands.iter().map(|&i| ev.record(i, j)));
                let mut scored: Vec<(usize, f64)> = cands.iter().filter_map(|&i| proxy_score(i)).collect();
                if j + 1 == chunks.len() {
                    best = argmax(scored);
                } else {
                    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
                    scored.dedup_by_key(|s| s.0);
                    survivors = scored.iter().take(k).map(|&(i, _)| space.choice(i)).collect();
                    if survivors.is_empty() {
                        break;
                    }
                }
            }
            best
        }
    };
    let (chosen_index, chosen_dummy_pst) = chosen.ok_or(SelectorError::NoViableCombination)?;
    let chosen_circuit = ev.transpiled(chosen_index).expect("chosen variant transpiled");

    let esp_ranked = esp_ranking(ev);
    let esp_pick = esp_ranked.first().map(|&(i, _)| i);
    let model_pick = if opts.noise_model_baseline && ev.ideal.is_some() {
        let idx = ev.all_indices();
        let scores: Vec<Option<f64>> = idx.par_iter().map(|&i| ev.model(i)).collect();
        argmax(scores.iter().enumerate().filter_map(|(i, s)| s.map(|s| (i, s)))).map(|(i, _)| i)
    } else {
        None
    };
    let default_index = space.index_of(&PassCombination::default());

    let oracle = if opts.oracle {
        let o = oracle_of(ev)?;
        let rel = |i: Option<usize>| -> Result<Option<_>, SelectorError> {
            match i.and_then(|i| ev.original(i)) {
                Some(p) => Ok(Some(fidelity_relative_to_oracle(p, o.best_pst)?)),
                None => Ok(None),
            }
        };
        let selected = fidelity_relative_to_oracle(ev.original(chosen_index).unwrap_or(0.0), o.best_pst)?;
        Some(OracleComparison {
            best: o.best,
            best_index: o.best_index,
            best_pst: o.best_pst,
            per_combo: o.per_combo.iter().map(|(_, p)| *p).collect(),
            selected,
            esp: rel(esp_pick)?,
            noise_model: rel(model_pick)?,
            default_combo: rel(default_index)?,
        })
    } else {
        None
    };
    let final_pst = if opts.run_final { ev.original(chosen_index) } else { None };
    // records may have been built before baselines ran; refresh their baseline columns
    for r in &mut records {
        r.noise_model_pst = ev.models[r.index].get().copied().flatten();
        r.oracle_pst = ev.originals[r.index].get().copied().flatten().map(|(p, _)| p);
    }

    let total_shots: u64 = records.iter().map(|r| r.shots).sum();
    let mut timings = Timings::default();
    let mut touched: Vec<usize> = records.iter().map(|r| r.index).collect();
    if opts.oracle {
        touched = ev.all_indices();
    } else {
        touched.push(chosen_index);
        touched.sort_unstable();
        touched.dedup();
    }
    for i in touched {
        if let Some(v) = ev.variants[i].get() {
            timings.transpile_s += v.elapsed.as_secs_f64();
        }
        if let Some(Ok(p)) = ev.proxies[i].get() {
            timings.dummy_s += p.dummy_time.as_secs_f64();
            timings.emulate_s += p.run_time.as_secs_f64();
        }
        if let Some(Some((_, t))) = ev.originals[i].get() {
            timings.emulate_s += t.as_secs_f64();
        }
    }
    timings.total_s = started.elapsed().as_secs_f64();

    Ok(SelectionReport {
        schema_version: SCHEMA_VERSION,
        method: method.name().to_string(),
        k: match method {
            Method::Optran => None,
            Method::OptranE { k } => Some(k),
        },
        seed: opts.seed,
        epoch: opts.epoch,
        shot_reduction: opts.shot_reduction,
        shots_per_peak: opts.shots_per_peak,
        baseline_shots: opts.shots,
        target_peaks: ev.target_peaks.unwrap_or_default(),
        evaluated: records.len(),
        chosen: ev.combos[chosen_index],
        chosen_index,
        chosen_dummy_pst,
        total_shots,
        shot_overhead: total_shots as f64 / opts.shots as f64,
        final_result: FinalResult {
            combo: ev.combos[chosen_index],
            stats: circuit_stats(chosen_circuit),
            esp: esp_predict(chosen_circuit, d),
            pst: final_pst,
        },
        baselines: Baselines {
            esp_ranking: esp_ranked.iter().map(|&(i, _)| i).collect(),
            esp_pick: esp_pick.map(|i| ev.combos[i]),
            noise_model_pick: model_pick.map(|i| ev.combos[i]),
            default_combo: PassCombination::default(),
        },
        oracle,
        timings,
        records,
    })
}

/// The chosen variant of the original circuit, as transpiled during selection.
pub fn chosen_circuit(
    c: &Circuit,
    d: &DeviceModel,
    report: &SelectionReport,
    passes: &PassConfig,
) -> Result<Circuit, SelectorError> {
    Ok(run_pipeline_with(c, d, &report.chosen, report.seed, passes)?)
}
