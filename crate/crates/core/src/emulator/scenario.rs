use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ir::DeviceModel;
use crate::rng;

use super::NoiseParams;

/// A synthetic truth for the emulator, derived from a device's calibration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// Edge whose true error is `hot_factor` times its calibrated value.
    pub hot_edge: Option<(usize, usize)>,
    pub hot_factor: f64,
    /// Per-edge multipliers applied to every other edge, `(edge, factor)`.
    pub edge_factors: Vec<((usize, usize), f64)>,
    pub readout_factors: Vec<f64>,
    pub drift: Vec<f64>,
}

impl Scenario {
    /// Truth equals calibration.
    pub fn calibrated(d: &DeviceModel) -> Self {
        Scenario {
            name: "calibrated".into(),
            hot_edge: None,
            hot_factor: 1.0,
            edge_factors: Vec::new(),
            readout_factors: vec![1.0; d.num_qubits],
            drift: Vec::new(),
        }
    }

    /// The calibrated-best edge has degraded 10x and gate errors drift 1.5x.
    pub fn biased(d: &DeviceModel) -> Self {
        let best = d
            .cx_error
            .iter()
            .fold(None, |acc: Option<(&(usize, usize), f64)>, (e, &p)| match acc {
                Some((_, q)) if q <= p => acc,
                _ => Some((e, p)),
            })
            .map(|(e, _)| *e);
        Scenario {
            name: "biased".into(),
            hot_edge: best,
            hot_factor: 10.0,
            drift: vec![1.5],
            ..Self::calibrated(d)
        }
    }

    /// Random per-edge and per-qubit drift plus one hot edge, all from `seed`.
    pub fn seeded_drift(d: &DeviceModel, seed: u64) -> Self {
        let mut r = rng::rng(rng::derive(seed, 0x6472_6966, 0));
        let edges: Vec<(usize, usize)> = d.cx_error.keys().copied().collect();
        let hot = edges[r.gen_range(0..edges.len())];
        let edge_factors = edges
            .iter()
            .filter(|&&e| e != hot)
            .map(|&e| (e, 2f64.powf(r.gen_range(-1.0..1.5))))
            .collect();
        let readout_factors = (0..d.num_qubits).map(|_| r.gen_range(0.7..1.5)).collect();
        Scenario {
            name: format!("drift-{seed}"),
            hot_edge: Some(hot),
            hot_factor: 10.0,
            edge_factors,
            readout_factors,
            drift: vec![1.5],
        }
    }

    pub fn noise_params(&self, d: &DeviceModel) -> NoiseParams {
        let mut np = NoiseParams::from_calibration(d);
        for &((a, b), f) in &self.edge_factors {
            np.scale_edge(a, b, f);
        }
        if let Some((a, b)) = self.hot_edge {
            np.scale_edge(a, b, self.hot_factor);
        }
        for (p, f) in np.readout_error.iter_mut().zip(&self.readout_factors) {
            *p = (*p * f).min(0.5);
        }
        np.drift = self.drift.clone();
        np
    }
}
