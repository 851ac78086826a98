use std::path::{Path, PathBuf};

use serde::Deserialize;

use passelect::clifford::MAX_STATEVECTOR_QUBITS;
use passelect::selector::{compare_methods, Method, SearchSpace, SelectOptions, SelectionReport};
use passelect::{gen_benchmark, BenchmarkSpec};

use crate::args::BenchArgs;
use crate::commands::{load_device, load_noise};
use crate::error::CliError;
use crate::output::write_atomic;

#[derive(Deserialize)]
#[serde(untagged)]
enum SuiteEntry {
    Name(String),
    Spec(BenchmarkSpec),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SuiteFile {
    List(Vec<SuiteEntry>),
    Object { benchmarks: Vec<SuiteEntry> },
}

fn load_suite(path: Option<&Path>, names: Option<&[String]>) -> Result<Vec<BenchmarkSpec>, CliError> {
    let entries = match (path, names) {
        (Some(path), _) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            match serde_json::from_str(&text).map_err(|e| CliError::input(format!("suite {}: {e}", path.display())))? {
                SuiteFile::List(v) | SuiteFile::Object { benchmarks: v } => v,
            }
        }
        (None, Some(names)) => names.iter().cloned().map(SuiteEntry::Name).collect(),
        (None, None) => return Ok(passelect::benchmarks::small_suite()),
    };
    entries
        .into_iter()
        .map(|e| match e {
            SuiteEntry::Name(n) => Ok(n.parse()?),
            SuiteEntry::Spec(s) => Ok(s),
        })
        .collect()
}

const METHODS: [(&str, Method); 3] = [
    ("optran", Method::Optran),
    ("optran_e1", Method::OptranE { k: 1 }),
    ("optran_e3", Method::OptranE { k: 3 }),
];

struct Row {
    name: String,
    qubits: usize,
    status: String,
    oracle_pst: Option<f64>,
    modes: Vec<Option<f64>>,
}

fn mode_names(noise_model: bool) -> Vec<&'static str> {
    let mut m: Vec<&str> = METHODS.iter().map(|(n, _)| *n).collect();
    m.push("esp");
    if noise_model {
        m.push("noise_model");
    }
    m.push("default");
    m
}

fn modes_of(reports: &[SelectionReport], noise_model: bool) -> Vec<Option<f64>> {
    let oracle = reports[0].oracle.as_ref().expect("oracle requested");
    let mut v: Vec<Option<f64>> = reports
        .iter()
        .map(|r| r.oracle.as_ref().map(|o| o.selected.value))
        .collect();
    v.push(oracle.esp.map(|f| f.value));
    if noise_model {
        v.push(oracle.noise_model.map(|f| f.value));
    }
    v.push(oracle.default_combo.map(|f| f.value));
    v
}

fn fmt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.flatten().collect();
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn summary_csv(rows: &[Row], modes: &[&str]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["benchmark", "qubits", "status", "oracle_pst"];
    header.extend(modes);
    let err = |e: csv::Error| CliError::internal(e.to_string());
    w.write_record(&header).map_err(err)?;
    for r in rows {
        let mut rec = vec![r.name.clone(), r.qubits.to_string(), r.status.clone(), fmt(r.oracle_pst)];
        rec.extend(r.modes.iter().map(|&m| fmt(m)));
        w.write_record(&rec).map_err(err)?;
    }
    let mut rec = vec!["mean".to_string(), String::new(), String::new(), String::new()];
    for j in 0..modes.len() {
        rec.push(fmt(mean(rows.iter().map(|r| r.modes.get(j).copied().flatten()))));
    }
    w.write_record(&rec).map_err(err)?;
    String::from_utf8(w.into_inner().map_err(|e| CliError::internal(e.to_string()))?)
        .map_err(|e| CliError::internal(e.to_string()))
}

pub fn bench(args: BenchArgs) -> Result<(), CliError> {
    let a = args.resolve()?;
    let suite = load_suite(a.suite.as_deref(), a.benchmarks.as_deref())?;
    if suite.is_empty() {
        return Err(CliError::input("benchmark suite is empty"));
    }
    let d = load_device(a.device.as_deref())?;
    let (np, scenario) = load_noise(a.noise.as_deref(), a.scenario.as_deref(), &d)?;
    let defaults = SelectOptions::default();
    let out_dir = a.out_dir.unwrap_or_else(|| PathBuf::from("."));
    let modes = mode_names(a.noise_model_baseline);
    let methods: Vec<Method> = METHODS.iter().map(|(_, m)| *m).collect();
    let mut rows = Vec::new();
    for spec in &suite {
        let name = spec.name();
        let mut row = Row {
            name: name.clone(),
            qubits: spec.num_qubits(),
            status: "ok".into(),
            oracle_pst: None,
            modes: vec![None; modes.len()],
        };
        if spec.num_qubits() > MAX_STATEVECTOR_QUBITS {
            row.status = "oracle-unavailable".into();
            eprintln!("warning: {name}: wider than the {MAX_STATEVECTOR_QUBITS}-qubit oracle cap");
            rows.push(row);
            continue;
        }
        let opts = SelectOptions {
            shots: a.shots.unwrap_or(defaults.shots),
            shots_per_peak: a.shots_per_peak.unwrap_or(defaults.shots_per_peak),
            seed: a.seed.unwrap_or(defaults.seed),
            epoch: a.epoch.unwrap_or(defaults.epoch),
            target_peaks: spec.ideal_peaks(),
            oracle: true,
            noise_model_baseline: a.noise_model_baseline,
            ..defaults.clone()
        };
        let result = gen_benchmark(spec)
            .map_err(CliError::from)
            .and_then(|c| Ok(compare_methods(&c, &d, &np, &SearchSpace::default(), &methods, &opts)?));
        match result {
            Ok(reports) => {
                row.oracle_pst = reports[0].oracle.as_ref().map(|o| o.best_pst);
                row.modes = modes_of(&reports, a.noise_model_baseline);
                for ((mode, _), r) in METHODS.iter().zip(&reports) {
                    let path = out_dir.join("reports").join(format!("{name}.{mode}.json"));
                    write_atomic(&path, r.to_json().as_bytes())?;
                }
            }
            Err(e) => {
                eprintln!("warning: {name}: {}", e.message);
                row.status = format!("error: {}", e.message);
            }
        }
        rows.push(row);
    }
    write_atomic(&out_dir.join("summary.csv"), summary_csv(&rows, &modes)?.as_bytes())?;
    let ok = rows.iter().filter(|r| r.status == "ok").count();
    println!("{ok}/{} benchmarks evaluated under scenario `{scenario}`", rows.len());
    if ok == 0 {
        return Err(CliError::internal("every benchmark failed"));
    }
    Ok(())
}
