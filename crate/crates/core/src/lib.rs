//! Per-circuit selection of transpiler pass combinations.
//!
//! A circuit is transpiled under every combination of mapping, routing,
//! scheduling and optional optimization passes. Each variant gets a Clifford
//! proxy that a stabilizer simulator can score exactly; the proxies run on a
//! noisy device emulator and the combination whose proxy fares best is used
//! for the real circuit.

pub mod benchmarks;
pub mod clifford;
pub mod emulator;
pub mod ir;
pub mod passes;
pub mod rng;
pub mod selector;

use thiserror::Error;

pub use benchmarks::{gen_benchmark, BenchmarkError, BenchmarkSpec};
pub use clifford::SimError;
pub use emulator::EmulatorError;
pub use ir::{Circuit, DeviceModel, Distribution, IrError};
pub use passes::{PassCombination, PassError};
pub use selector::SelectorError;

/// Dense simulator in double precision.
pub type Statevector = clifford::Statevector<f64>;
/// Dense simulator in single precision.
pub type StatevectorF32 = clifford::Statevector<f32>;
/// Complex amplitude type used by [`Statevector`].
pub type Amplitude = num_complex::Complex<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Ir(#[from] IrError),
    #[error(transparent)]
    Qasm(#[from] ir::QasmError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Pass(#[from] PassError),
    #[error(transparent)]
    Emulator(#[from] EmulatorError),
    #[error(transparent)]
    Selector(#[from] SelectorError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
}
