use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::circuit::GateKind;
use super::IrError;

/// Per-kind instruction durations in dt.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Durations {
    #[serde(rename = "1q")]
    pub single: u64,
    pub cx: u64,
    pub measure: u64,
    /// Overrides `single` for RZ when present (virtual-Z hardware uses 0).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rz: Option<u64>,
}

impl Default for Durations {
    fn default() -> Self {
        Durations {
            single: 1,
            cx: 5,
            measure: 20,
            rz: None,
        }
    }
}

impl Durations {
    /// Duration of one instruction kind, `None` when the kind is not schedulable.
    pub fn of(&self, kind: GateKind) -> Option<u64> {
        match kind {
            GateKind::RZ => Some(self.rz.unwrap_or(self.single)),
            k if k.is_single_qubit_gate() => Some(self.single),
            GateKind::CX => Some(self.cx),
            GateKind::Measure => Some(self.measure),
            GateKind::Barrier => Some(0),
            _ => None,
        }
    }
}

/// Error rates that differ from the published calibration.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RateOverlay {
    #[serde(default)]
    pub cx_error: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub readout_error: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sq_error: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct DeviceFile {
    num_qubits: usize,
    coupling: Vec<[usize; 2]>,
    cx_error: BTreeMap<String, f64>,
    readout_error: Vec<f64>,
    t1: Vec<f64>,
    t2: Vec<f64>,
    #[serde(default)]
    durations: Durations,
    #[serde(default = "default_basis")]
    basis: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sq_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    true_rates: Option<RateOverlay>,
}

fn default_basis() -> Vec<String> {
    ["id", "x", "sx", "rz", "cx"].iter().map(|s| s.to_string()).collect()
}

/// Contents of `data/heavy_hex_27.json`.
pub const HEAVY_HEX_27: &str = include_str!("../../data/heavy_hex_27.json");

pub fn edge_key(a: usize, b: usize) -> String {
    let (a, b) = (a.min(b), a.max(b));
    format!("{a}-{b}")
}

fn parse_edge_key(key: &str) -> Option<(usize, usize)> {
    let (a, b) = key.split_once('-')?;
    let (a, b): (usize, usize) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
    Some((a.min(b), a.max(b)))
}

/// Coupling graph plus calibration data of a target device.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviceModel {
    pub num_qubits: usize,
    /// Undirected edges as `(low, high)`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub cx_error: BTreeMap<(usize, usize), f64>,
    pub readout_error: Vec<f64>,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    pub durations: Durations,
    pub basis: BTreeSet<GateKind>,
    /// Calibrated single-qubit gate error (0 when the file omits it).
    pub sq_error: f64,
    pub true_rates: Option<RateOverlay>,
    adjacency: Vec<Vec<usize>>,
    distance: Vec<Vec<u32>>,
}

impl DeviceModel {
    /// Validate raw calibration data and build the distance tables.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        num_qubits: usize,
        coupling: &[(usize, usize)],
        cx_error: BTreeMap<(usize, usize), f64>,
        readout_error: Vec<f64>,
        t1: Vec<f64>,
        t2: Vec<f64>,
        durations: Durations,
        basis: BTreeSet<GateKind>,
    ) -> Result<Self, IrError> {
        if coupling.is_empty() && num_qubits != 1 {
            return Err(IrError::Device("coupling graph is empty".into()));
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &(a, b) in coupling {
            if a == b || a >= num_qubits || b >= num_qubits {
                return Err(IrError::Device(format!("invalid coupling edge {a}-{b}")));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();
        for (name, v) in [("readout_error", &readout_error), ("t1", &t1), ("t2", &t2)] {
            if v.len() != num_qubits {
                return Err(IrError::Device(format!(
                    "`{name}` has {} entries, expected {num_qubits}",
                    v.len()
                )));
            }
        }
        for e in &edges {
            let p = *cx_error
                .get(e)
                .ok_or_else(|| IrError::MissingField(format!("cx_error[{}]", edge_key(e.0, e.1))))?;
            check_probability(&format!("cx_error[{}]", edge_key(e.0, e.1)), p)?;
        }
        for (q, &p) in readout_error.iter().enumerate() {
            check_probability(&format!("readout_error[{q}]"), p)?;
        }
        for q in 0..num_qubits {
            if !(t1[q] > 0.0 && t2[q] > 0.0) {
                return Err(IrError::Device(format!("qubit {q}: t1 and t2 must be positive")));
            }
            if t2[q] > 2.0 * t1[q] {
                return Err(IrError::Device(format!("qubit {q}: t2 exceeds 2·t1")));
            }
        }
        let mut adjacency = vec![Vec::new(); num_qubits];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for n in &mut adjacency {
            n.sort_unstable();
        }
        let distance: Vec<Vec<u32>> = (0..num_qubits).map(|s| bfs_distances(&adjacency, s)).collect();
        if distance.first().is_some_and(|row| row.iter().any(|&d| d == u32::MAX)) {
            return Err(IrError::Device("coupling graph is disconnected".into()));
        }
        let cx_error = edges.iter().map(|e| (*e, cx_error[e])).collect();
        Ok(DeviceModel {
            num_qubits,
            edges,
            cx_error,
            readout_error,
            t1,
            t2,
            durations,
            basis,
            sq_error: 0.0,
            true_rates: None,
            adjacency,
            distance,
        })
    }

    /// Uniform-rate device over the given edges, handy for tests and scenarios.
    pub fn uniform(
        num_qubits: usize,
        coupling: &[(usize, usize)],
        cx_error: f64,
        readout_error: f64,
    ) -> Result<Self, IrError> {
        let errs = coupling.iter().map(|&(a, b)| ((a.min(b), a.max(b)), cx_error)).collect();
        Self::new(
            num_qubits,
            coupling,
            errs,
            vec![readout_error; num_qubits],
            vec![2000.0; num_qubits],
            vec![1500.0; num_qubits],
            Durations::default(),
            default_basis_set(),
        )
    }

    /// A path `0 - 1 - … - (n-1)` with uniform rates.
    pub fn line(num_qubits: usize, cx_error: f64, readout_error: f64) -> Result<Self, IrError> {
        let edges: Vec<_> = (1..num_qubits).map(|i| (i - 1, i)).collect();
        Self::uniform(num_qubits, &edges, cx_error, readout_error)
    }

    /// The bundled 27-qubit heavy-hex device with synthetic calibration.
    pub fn heavy_hex_27() -> Self {
        Self::from_json(HEAVY_HEX_27).expect("bundled device file is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, IrError> {
        let file: DeviceFile = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            if msg.starts_with("missing field") {
                IrError::MissingField(msg)
            } else {
                IrError::Json(msg)
            }
        })?;
        let mut cx_error = BTreeMap::new();
        for (k, v) in &file.cx_error {
            let e = parse_edge_key(k).ok_or_else(|| IrError::Device(format!("bad edge key `{k}`")))?;
            cx_error.insert(e, *v);
        }
        let basis = file
            .basis
            .iter()
            .map(|s| GateKind::from_name(s).ok_or_else(|| IrError::Device(format!("unknown basis gate `{s}`"))))
            .collect::<Result<_, _>>()?;
        let coupling: Vec<_> = file.coupling.iter().map(|e| (e[0], e[1])).collect();
        let mut d = Self::new(
            file.num_qubits,
            &coupling,
            cx_error,
            file.readout_error,
            file.t1,
            file.t2,
            file.durations,
            basis,
        )?;
        if let Some(p) = file.sq_error {
            check_probability("sq_error", p)?;
            d.sq_error = p;
        }
        if let Some(overlay) = &file.true_rates {
            d.check_overlay(overlay)?;
        }
        d.true_rates = file.true_rates;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        let file = DeviceFile {
            num_qubits: self.num_qubits,
            coupling: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            cx_error: self.cx_error.iter().map(|(&(a, b), &p)| (edge_key(a, b), p)).collect(),
            readout_error: self.readout_error.clone(),
            t1: self.t1.clone(),
            t2: self.t2.clone(),
            durations: self.durations,
            basis: self.basis.iter().map(|k| k.name().to_string()).collect(),
            sq_error: (self.sq_error > 0.0).then_some(self.sq_error),
            true_rates: self.true_rates.clone(),
        };
        serde_json::to_string_pretty(&file).expect("device model serializes")
    }

    pub(crate) fn check_overlay(&self, overlay: &RateOverlay) -> Result<(), IrError> {
        for (k, &p) in &overlay.cx_error {
            let e = parse_edge_key(k).ok_or_else(|| IrError::Device(format!("bad edge key `{k}`")))?;
            if !self.cx_error.contains_key(&e) {
                return Err(IrError::Device(format!("rate overlay names uncoupled edge `{k}`")));
            }
            check_probability(&format!("true cx_error[{k}]"), p)?;
        }
        if let Some(ro) = &overlay.readout_error {
            if ro.len() != self.num_qubits {
                return Err(IrError::Device("true readout_error length mismatch".into()));
            }
            for (q, &p) in ro.iter().enumerate() {
                check_probability(&format!("true readout_error[{q}]"), p)?;
            }
        }
        if let Some(p) = overlay.sq_error {
            check_probability("true sq_error", p)?;
        }
        Ok(())
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn is_coupled(&self, a: usize, b: usize) -> bool {
        a < self.num_qubits && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Hop distance in the coupling graph.
    pub fn distance(&self, a: usize, b: usize) -> u32 {
        self.distance[a][b]
    }

    pub fn edge_error(&self, a: usize, b: usize) -> Option<f64> {
        self.cx_error.get(&(a.min(b), a.max(b))).copied()
    }

    /// Lexicographically smallest shortest path from `from` to `to`, inclusive.
    pub fn shortest_path(&self, from: usize, to: usize) -> Vec<usize> {
        self.shortest_path_avoiding(from, to, &[]).expect("coupling graph is connected")
    }

    /// As [`Self::shortest_path`], but never stepping on `blocked` nodes
    /// (the endpoints themselves may be blocked).
    pub fn shortest_path_avoiding(&self, from: usize, to: usize, blocked: &[usize]) -> Option<Vec<usize>> {
        let mut dist = vec![u32::MAX; self.num_qubits];
        let mut queue = VecDeque::from([to]);
        dist[to] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adjacency[u] {
                if dist[v] == u32::MAX && (v == from || !blocked.contains(&v)) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist[from] == u32::MAX {
            return None;
        }
        let mut path = vec![from];
        let mut cur = from;
        while cur != to {
            cur = *self.adjacency[cur]
                .iter()
                .find(|&&v| dist[v] != u32::MAX && dist[v] + 1 == dist[cur])
                .expect("distance labels are consistent");
            path.push(cur);
        }
        Some(path)
    }

    pub fn in_basis(&self, kind: GateKind) -> bool {
        kind.is_directive() || self.basis.contains(&kind)
    }
}

pub fn default_basis_set() -> BTreeSet<GateKind> {
    [GateKind::I, GateKind::X, GateKind::SX, GateKind::RZ, GateKind::CX].into()
}

fn check_probability(name: &str, p: f64) -> Result<(), IrError> {
    if (0.0..1.0).contains(&p) {
        Ok(())
    } else {
        Err(IrError::Probability { name: name.into(), value: p })
    }
}

fn bfs_distances(adj: &[Vec<usize>], source: usize) -> Vec<u32> {
    let mut dist = vec![u32::MAX; adj.len()];
    dist[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v] == u32::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Read and validate a device model file.
pub fn load_device_model(path: impl AsRef<Path>) -> Result<DeviceModel, IrError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| IrError::Io(format!("{}: {e}", path.display())))?;
    DeviceModel::from_json(&text)
}
