//! Transpiler passes and the pipeline that chains them.
//!
//! Every pass is a pure function of its inputs and an explicit seed.

mod combination;
mod fusion;
mod layout;
mod pipeline;
mod routing;
mod schedule;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::{GateKind, IrError, Violation};

pub use combination::{Mapper, PassCombination, Router, Scheduler};
pub use fusion::{fuse_single_qubit, unitary_of_run};
pub use layout::{map_dense, map_noise_adaptive, map_sabre, map_trivial, Layout};
pub use pipeline::{run_pipeline, run_pipeline_with, translate_to_basis};
pub use routing::{route_basic, route_lookahead, route_sabre, route_stochastic, Routed};
pub use schedule::{apply_dd, schedule};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PassError {
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error("circuit needs {needed} qubits but the device has {available}")]
    CircuitTooLarge { needed: usize, available: usize },
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("unknown {stage} option `{value}`")]
    UnknownOption { stage: String, value: String },
    #[error("stochastic routing exhausted its budget of {0} trials")]
    TrialBudgetExhausted(usize),
    #[error("cannot route `{kind}` on physical qubits {qubits:?}")]
    Unroutable { kind: GateKind, qubits: Vec<usize> },
    #[error("`{0}` has no duration on this device")]
    MissingDuration(GateKind),
    #[error("circuit is not scheduled")]
    NotScheduled,
    #[error("output violates device constraints: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Illegal(Vec<Violation>),
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Constants of the SABRE heuristic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SabreConfig {
    /// Gates beyond the front layer included in the lookahead term.
    pub lookahead: usize,
    pub lookahead_weight: f64,
    /// Per-swap decay factor; a qubit's penalty is divided by it on every swap.
    pub decay: f64,
    /// Non-improving steps tolerated before the forced escape.
    pub reset_after: usize,
    /// Forward/backward round trips of layout search.
    pub layout_iterations: usize,
}

impl Default for SabreConfig {
    fn default() -> Self {
        SabreConfig {
            lookahead: 20,
            lookahead_weight: 0.5,
            decay: 0.9,
            reset_after: 10,
            layout_iterations: 3,
        }
    }
}

/// Pulse pair used to fill idle windows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DdSequence {
    #[default]
    Xx,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PassConfig {
    pub sabre: SabreConfig,
    pub stochastic_trials: usize,
    pub dd_sequence: DdSequence,
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            sabre: SabreConfig::default(),
            stochastic_trials: 64,
            dd_sequence: DdSequence::Xx,
        }
    }
}

impl PassConfig {
    pub fn check(&self) -> Result<(), PassError> {
        let s = &self.sabre;
        if !(s.decay > 0.0 && s.decay <= 1.0) {
            return Err(PassError::Config(format!("sabre decay {} outside (0, 1]", s.decay)));
        }
        if !(s.lookahead_weight >= 0.0) {
            return Err(PassError::Config("sabre lookahead weight must be nonnegative".into()));
        }
        if s.reset_after == 0 || s.layout_iterations == 0 {
            return Err(PassError::Config("sabre reset and iteration counts must be positive".into()));
        }
        if self.stochastic_trials == 0 {
            return Err(PassError::Config("stochastic_trials must be positive".into()));
        }
        Ok(())
    }
}
