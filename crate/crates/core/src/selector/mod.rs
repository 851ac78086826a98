//! Pass-combination search driven by Clifford proxies, with the metrics and
//! baseline predictors used to judge it.

mod metrics;
mod optran;
mod report;
mod space;

use thiserror::Error;

use crate::clifford::SimError;
use crate::emulator::EmulatorError;
use crate::passes::PassError;

pub use metrics::{correlation, fidelity_relative_to_oracle, pst, shot_budget, RelativeFidelity};
pub use optran::{
    chosen_circuit, compare_methods, esp_rank, optran, optran_e, oracle_search, select, Method, OracleResult, SelectOptions,
};
pub use report::{
    Baselines, ComboRecord, FinalResult, OracleComparison, SelectionReport, Timings, CSV_COLUMNS, SCHEMA_VERSION,
};
pub use space::{enumerate_combinations, SearchSpace, Stage};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelectorError {
    #[error(transparent)]
    Pass(#[from] PassError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Emulator(#[from] EmulatorError),
    #[error("invalid search space: {0}")]
    Space(String),
    #[error("counts have width {counts} but the ideal distribution has width {ideal}")]
    WidthMismatch { counts: usize, ideal: usize },
    #[error("no shots recorded")]
    EmptyCounts,
    #[error("oracle fidelity is zero")]
    ZeroOracle,
    #[error("degenerate sample: {0}")]
    Degenerate(String),
    #[error("every pass combination failed")]
    NoViableCombination,
    #[error("peak count of the original is unknown; it is too large to simulate, supply it explicitly")]
    TargetPeaksUnknown,
    #[error("oracle needs a noisy simulation of the original, which has {0} active qubits")]
    OracleUnavailable(usize),
    #[error("{0}")]
    Io(String),
}
