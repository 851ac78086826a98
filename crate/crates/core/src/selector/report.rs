use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ir::CircuitStats;
use crate::passes::PassCombination;

use super::metrics::RelativeFidelity;
use super::SelectorError;

pub const SCHEMA_VERSION: u32 = 1;

/// One evaluated combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComboRecord {
    /// Position in the full enumeration of the search space.
    pub index: usize,
    pub combo: PassCombination,
    /// Search chunk that evaluated this record (0 for exhaustive search).
    pub chunk: usize,
    /// Why the combination was excluded, if it was.
    pub error: Option<String>,
    pub transpiled: Option<CircuitStats>,
    pub dummy: Option<CircuitStats>,
    pub dummy_attempts: Option<usize>,
    pub peaks: Option<u64>,
    pub shots: u64,
    pub dummy_pst: Option<f64>,
    pub esp: Option<f64>,
    pub noise_model_pst: Option<f64>,
    pub oracle_pst: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FinalResult {
    pub combo: PassCombination,
    pub stats: CircuitStats,
    pub esp: f64,
    /// PST of the original circuit under the chosen combination, if executed.
    pub pst: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baselines {
    /// Combination indices by descending ESP.
    pub esp_ranking: Vec<usize>,
    pub esp_pick: Option<PassCombination>,
    pub noise_model_pick: Option<PassCombination>,
    pub default_combo: PassCombination,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub best: PassCombination,
    pub best_index: usize,
    pub best_pst: f64,
    /// Original-circuit PST per combination index; `None` for failed variants.
    pub per_combo: Vec<Option<f64>>,
    pub selected: RelativeFidelity,
    pub esp: Option<RelativeFidelity>,
    pub noise_model: Option<RelativeFidelity>,
    pub default_combo: Option<RelativeFidelity>,
}

/// Classical wall-clock time spent per phase, summed over workers.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub transpile_s: f64,
    pub dummy_s: f64,
    pub emulate_s: f64,
    pub total_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub schema_version: u32,
    pub method: String,
    pub k: Option<usize>,
    pub seed: u64,
    pub epoch: usize,
    pub shot_reduction: bool,
    pub shots_per_peak: u64,
    pub baseline_shots: u64,
    pub target_peaks: u64,
    pub evaluated: usize,
    pub records: Vec<ComboRecord>,
    pub chosen: PassCombination,
    pub chosen_index: usize,
    pub chosen_dummy_pst: f64,
    pub total_shots: u64,
    /// Total proxy shots relative to one baseline execution.
    pub shot_overhead: f64,
    pub final_result: FinalResult,
    pub baselines: Baselines,
    pub oracle: Option<OracleComparison>,
    pub timings: Timings,
}

/// CSV columns, one row per evaluated record.
pub const CSV_COLUMNS: [&str; 15] = [
    "index",
    "chunk",
    "mapper",
    "router",
    "scheduler",
    "trios",
    "dd",
    "status",
    "cx_count",
    "peaks",
    "shots",
    "dummy_pst",
    "esp",
    "noise_model_pst",
    "oracle_pst",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SelectionReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// JSON without the `timings` object, for byte comparisons.
    pub fn to_json_without_timings(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("report serializes")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SelectorError> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| SelectorError::Io(e.to_string());
        w.write_record(CSV_COLUMNS).map_err(io)?;
        for r in &self.records {
            let oracle = r.oracle_pst.or_else(|| {
                self.oracle
                    .as_ref()
                    .and_then(|o| o.per_combo.get(r.index).copied().flatten())
            });
            w.write_record([
                r.index.to_string(),
                r.chunk.to_string(),
                r.combo.mapper.to_string(),
                r.combo.router.to_string(),
                r.combo.scheduler.to_string(),
                r.combo.trios.to_string(),
                r.combo.dd.to_string(),
                if r.error.is_some() { "failed".into() } else { "ok".into() },
                opt(r.transpiled.map(|s| s.cx_count)),
                opt(r.peaks),
                r.shots.to_string(),
                opt(r.dummy_pst),
                opt(r.esp),
                opt(r.noise_model_pst),
                opt(oracle),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| SelectorError::Io(e.to_string()))
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}
