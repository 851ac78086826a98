use std::path::{Path, PathBuf};

use passelect::emulator::{NoiseParams, Scenario};
use passelect::ir::{circuit_stats, emit_qasm, load_device_model, parse_qasm};
use passelect::passes::{run_pipeline, PassCombination};
use passelect::selector::{self, chosen_circuit, Method, SearchSpace, SelectOptions};
use passelect::{gen_benchmark, BenchmarkSpec, Circuit, DeviceModel};
use serde_json::json;

use crate::args::{GenArgs, SelectArgs, TranspileArgs};
use crate::error::CliError;
use crate::output::write_atomic;

pub fn load_circuit(circuit: Option<&Path>, benchmark: Option<&str>) -> Result<Circuit, CliError> {
    match (circuit, benchmark) {
        (Some(path), None) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            Ok(parse_qasm(&text)?)
        }
        (None, Some(name)) => Ok(gen_benchmark(&name.parse::<BenchmarkSpec>()?)?),
        (None, None) => Err(CliError::usage("one of --circuit or --benchmark is required")),
        (Some(_), Some(_)) => Err(CliError::input("--circuit and --benchmark are mutually exclusive")),
    }
}

pub fn load_device(path: Option<&Path>) -> Result<DeviceModel, CliError> {
    match path {
        Some(p) => Ok(load_device_model(p)?),
        None => Ok(DeviceModel::heavy_hex_27()),
    }
}

pub fn parse_scenario(name: &str, d: &DeviceModel) -> Result<Scenario, CliError> {
    match name {
        "calibrated" => Ok(Scenario::calibrated(d)),
        "biased" => Ok(Scenario::biased(d)),
        _ => name
            .strip_prefix("drift-")
            .and_then(|s| s.parse().ok())
            .map(|seed| Scenario::seeded_drift(d, seed))
            .ok_or_else(|| CliError::input(format!("unknown scenario `{name}`"))),
    }
}

/// Emulator truth: a noise file, a named scenario, or the device's own overlay.
pub fn load_noise(
    noise: Option<&Path>,
    scenario: Option<&str>,
    d: &DeviceModel,
) -> Result<(NoiseParams, String), CliError> {
    match (noise, scenario) {
        (Some(_), Some(_)) => Err(CliError::input("--noise and --scenario are mutually exclusive")),
        (Some(path), None) => Ok((NoiseParams::load(path, d)?, format!("file:{}", path.display()))),
        (None, Some(name)) if name != "device" => {
            let s = parse_scenario(name, d)?;
            Ok((s.noise_params(d), s.name))
        }
        _ => Ok((NoiseParams::from_device(d), "device".into())),
    }
}

pub fn parse_method(method: Option<&str>, k: Option<usize>) -> Result<Method, CliError> {
    match method.unwrap_or("optran") {
        "optran" => match k {
            None => Ok(Method::Optran),
            Some(_) => Err(CliError::usage("--k applies to optran-e only")),
        },
        "optran-e" | "optran_e" => Ok(Method::OptranE { k: k.unwrap_or(1) }),
        m => Err(CliError::usage(format!("unknown method `{m}`; expected optran or optran-e"))),
    }
}

fn parse_space(space: Option<&str>) -> Result<SearchSpace, CliError> {
    match space.unwrap_or("full") {
        "full" => Ok(SearchSpace::default()),
        "mrs" => Ok(SearchSpace::mapping_routing_scheduling()),
        s => Err(CliError::usage(format!("unknown space `{s}`; expected full or mrs"))),
    }
}

pub fn transpile(args: TranspileArgs) -> Result<(), CliError> {
    let a = args.resolve()?;
    let c = load_circuit(a.circuit.as_deref(), a.benchmark.as_deref())?;
    let d = load_device(a.device.as_deref())?;
    let default = PassCombination::default();
    let combo = PassCombination {
        mapper: a.mapper.unwrap_or(default.mapper),
        router: a.router.unwrap_or(default.router),
        scheduler: a.scheduler.unwrap_or(default.scheduler),
        trios: a.trios,
        dd: a.dd,
    };
    let seed = a.seed.unwrap_or(0);
    let out = run_pipeline(&c, &d, &combo, seed)?;
    let qasm = emit_qasm(&out);
    let stats = json!({
        "combo": combo.to_string(),
        "seed": seed,
        "stats": circuit_stats(&out),
        "makespan": out.makespan(),
        "final_layout": out.final_layout,
    });
    match &a.output {
        Some(path) => {
            write_atomic(path, qasm.as_bytes())?;
            println!("{stats}");
        }
        None => {
            print!("{qasm}");
            eprintln!("{stats}");
        }
    }
    Ok(())
}

pub fn select(args: SelectArgs) -> Result<(), CliError> {
    let a = args.resolve()?;
    let c = load_circuit(a.circuit.as_deref(), a.benchmark.as_deref())?;
    let d = load_device(a.device.as_deref())?;
    let (np, _) = load_noise(a.noise.as_deref(), a.scenario.as_deref(), &d)?;
    let method = parse_method(a.method.as_deref(), a.k)?;
    let space = parse_space(a.space.as_deref())?;
    let defaults = SelectOptions::default();
    let opts = SelectOptions {
        shot_reduction: !a.no_shot_reduction,
        shots_per_peak: a.shots_per_peak.unwrap_or(defaults.shots_per_peak),
        shots: a.shots.unwrap_or(defaults.shots),
        seed: a.seed.unwrap_or(defaults.seed),
        epoch: a.epoch.unwrap_or(defaults.epoch),
        target_peaks: a.target_peaks,
        run_final: !a.no_final_run,
        oracle: a.oracle,
        noise_model_baseline: a.noise_model_baseline,
        ..defaults
    };
    let report = selector::select(&c, &d, &np, &space, method, &opts)?;
    let dir = a.out_dir.unwrap_or_else(|| PathBuf::from("."));
    write_atomic(&dir.join("report.json"), report.to_json().as_bytes())?;
    write_atomic(&dir.join("report.csv"), report.to_csv().as_bytes())?;
    if let Some(path) = &a.emit_circuit {
        let chosen = chosen_circuit(&c, &d, &report, &opts.passes)?;
        write_atomic(path, emit_qasm(&chosen).as_bytes())?;
    }
    println!(
        "{}",
        json!({
            "chosen": report.chosen.to_string(),
            "chosen_dummy_pst": report.chosen_dummy_pst,
            "evaluated": report.evaluated,
            "total_shots": report.total_shots,
            "shot_overhead": report.shot_overhead,
            "final_pst": report.final_result.pst,
            "oracle_relative": report.oracle.as_ref().map(|o| o.selected.value),
        })
    );
    Ok(())
}

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    let spec: BenchmarkSpec = a.benchmark.parse()?;
    let qasm = emit_qasm(&gen_benchmark(&spec)?);
    match &a.output {
        Some(path) => write_atomic(path, qasm.as_bytes()),
        None => {
            print!("{qasm}");
            Ok(())
        }
    }
}
