use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use passelect::passes::{Mapper, Router, Scheduler};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "passelect", version, about = "Pick transpiler passes per circuit using Clifford proxies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Transpile one circuit under one pass combination.
    Transpile(TranspileArgs),
    /// Search pass combinations for a circuit and write a selection report.
    Select(SelectArgs),
    /// Run a benchmark suite and summarize fidelity relative to the oracle.
    Bench(BenchArgs),
    /// Write a generated benchmark circuit as OpenQASM.
    Gen(GenArgs),
}

/// Flags absent on the command line fall back to the config file.
macro_rules! merge {
    ($cli:ident, $cfg:ident; opts: $($o:ident),*; flags: $($f:ident),*) => {{
        $( if $cli.$o.is_none() { $cli.$o = $cfg.$o.take(); } )*
        $( $cli.$f |= $cfg.$f; )*
    }};
}

pub fn load_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::input(format!("config {}: {e}", path.display())))
}

/// Mutually exclusive options move over from the config only as a pair.
fn merge_either<A, B>(a: &mut Option<A>, b: &mut Option<B>, cfg_a: &mut Option<A>, cfg_b: &mut Option<B>) {
    if a.is_none() && b.is_none() {
        *a = cfg_a.take();
        *b = cfg_b.take();
    }
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TranspileArgs {
    /// OpenQASM 2 input file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Generated benchmark name such as `bv8` or `ghz12`.
    #[arg(long, conflicts_with = "circuit")]
    pub benchmark: Option<String>,
    /// Device model JSON; the bundled 27-qubit heavy-hex device when omitted.
    #[arg(long)]
    pub device: Option<PathBuf>,
    #[arg(long)]
    pub mapper: Option<Mapper>,
    #[arg(long)]
    pub router: Option<Router>,
    #[arg(long)]
    pub scheduler: Option<Scheduler>,
    #[arg(long)]
    pub trios: bool,
    #[arg(long)]
    pub dd: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output OpenQASM path; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// JSON file with defaults for any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl TranspileArgs {
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let mut cfg: TranspileArgs = load_config(self.config.as_deref())?;
        let (cli, cfg) = (&mut self, &mut cfg);
        merge!(cli, cfg; opts: device, mapper, router, scheduler, seed, output; flags: trios, dd);
        merge_either(&mut cli.circuit, &mut cli.benchmark, &mut cfg.circuit, &mut cfg.benchmark);
        Ok(self)
    }
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectArgs {
    /// OpenQASM 2 input file.
    #[arg(long)]
    pub circuit: Option<PathBuf>,
    /// Generated benchmark name such as `bv8` or `ghz12`.
    #[arg(long, conflicts_with = "circuit")]
    pub benchmark: Option<String>,
    #[arg(long)]
    pub device: Option<PathBuf>,
    /// Noise parameter JSON for the emulator's true rates.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Synthetic truth: `device`, `calibrated`, `biased` or `drift-<seed>`.
    #[arg(long, conflicts_with = "noise")]
    pub scenario: Option<String>,
    /// `optran` or `optran-e`.
    #[arg(long)]
    pub method: Option<String>,
    /// Survivors per chunk for `optran-e`.
    #[arg(long)]
    pub k: Option<usize>,
    /// `full` (72 combinations) or `mrs` (mapping, routing, scheduling).
    #[arg(long)]
    pub space: Option<String>,
    #[arg(long)]
    pub shots_per_peak: Option<u64>,
    /// Give every proxy the full shot count.
    #[arg(long)]
    pub no_shot_reduction: bool,
    /// Shots of an ordinary execution.
    #[arg(long)]
    pub shots: Option<u64>,
    /// Also execute the original under every combination.
    #[arg(long)]
    pub oracle: bool,
    /// Also rank combinations with the calibration noise model.
    #[arg(long)]
    pub noise_model_baseline: bool,
    /// Skip executing the chosen variant.
    #[arg(long)]
    pub no_final_run: bool,
    #[arg(long)]
    pub epoch: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Peak count of the ideal output, for circuits too wide to simulate.
    #[arg(long)]
    pub target_peaks: Option<u64>,
    /// Directory for `report.json` and `report.csv`.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Also write the chosen transpiled circuit here.
    #[arg(long)]
    pub emit_circuit: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl SelectArgs {
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let mut cfg: SelectArgs = load_config(self.config.as_deref())?;
        let (cli, cfg) = (&mut self, &mut cfg);
        merge!(cli, cfg;
            opts: device, method, k, space, shots_per_peak, shots, epoch, seed, target_peaks, out_dir, emit_circuit;
            flags: no_shot_reduction, oracle, noise_model_baseline, no_final_run);
        merge_either(&mut cli.circuit, &mut cli.benchmark, &mut cfg.circuit, &mut cfg.benchmark);
        merge_either(&mut cli.noise, &mut cli.scenario, &mut cfg.noise, &mut cfg.scenario);
        Ok(self)
    }
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchArgs {
    /// Suite JSON: a list of benchmark names or specs, or `{"benchmarks": [...]}`.
    #[arg(long)]
    pub suite: Option<PathBuf>,
    /// Comma-separated benchmark names, used when no suite file is given.
    #[arg(long, value_delimiter = ',')]
    pub benchmarks: Option<Vec<String>>,
    #[arg(long)]
    pub device: Option<PathBuf>,
    /// Noise parameter JSON for the emulator's true rates.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    /// Synthetic truth: `device`, `calibrated`, `biased` or `drift-<seed>`.
    #[arg(long, conflicts_with = "noise")]
    pub scenario: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub shots_per_peak: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub epoch: Option<usize>,
    /// Include the calibration noise-model pick as a mode.
    #[arg(long)]
    pub noise_model_baseline: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

impl BenchArgs {
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let mut cfg: BenchArgs = load_config(self.config.as_deref())?;
        let (cli, cfg) = (&mut self, &mut cfg);
        merge!(cli, cfg;
            opts: suite, benchmarks, device, shots, shots_per_peak, seed, epoch, out_dir;
            flags: noise_model_baseline);
        merge_either(&mut cli.noise, &mut cli.scenario, &mut cfg.noise, &mut cfg.scenario);
        Ok(self)
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Benchmark name such as `adder6`.
    pub benchmark: String,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
