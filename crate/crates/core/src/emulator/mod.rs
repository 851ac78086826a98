//! Noisy device emulator and the calibration-based fidelity predictors.
//!
//! The emulator draws its rates from [`NoiseParams`], which may differ from
//! the calibration data in a [`DeviceModel`]; the predictors only ever see
//! the calibration data.

mod execute;
mod noise;
mod scenario;

use thiserror::Error;

use crate::clifford::SimError;
use crate::ir::{IrError, Violation};

pub use execute::{esp_predict, execute, noise_model_predict};
pub use noise::{idle_pauli_probs, NoiseParams};
pub use scenario::Scenario;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmulatorError {
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("circuit is not executable on this device: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("circuit must be scheduled before execution")]
    NotScheduled,
    #[error("epoch {epoch} outside the drift schedule of length {len}")]
    Epoch { epoch: usize, len: usize },
    #[error("invalid noise parameters: {0}")]
    Params(String),
}
