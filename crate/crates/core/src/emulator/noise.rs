use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ir::{edge_key, DeviceModel, IrError, RateOverlay};

use super::EmulatorError;

/// Ground-truth error rates driving the emulator.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseParams {
    pub cx_error: BTreeMap<(usize, usize), f64>,
    pub readout_error: Vec<f64>,
    /// Depolarizing probability after each non-virtual single-qubit gate.
    pub depol_1q: f64,
    pub t1: Vec<f64>,
    pub t2: Vec<f64>,
    /// Idle decoherence on or off.
    pub idle: bool,
    /// Per-epoch multiplier on gate errors; empty means 1 at every epoch.
    pub drift: Vec<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct NoiseFile {
    #[serde(flatten)]
    rates: RateOverlay,
    #[serde(default)]
    drift: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    idle: Option<bool>,
}

impl NoiseParams {
    /// Truth equal to the device calibration.
    pub fn from_calibration(d: &DeviceModel) -> Self {
        NoiseParams {
            cx_error: d.cx_error.clone(),
            readout_error: d.readout_error.clone(),
            depol_1q: d.sq_error,
            t1: d.t1.clone(),
            t2: d.t2.clone(),
            idle: true,
            drift: Vec::new(),
        }
    }

    /// Calibration with the device file's `true_rates` overlay applied.
    pub fn from_device(d: &DeviceModel) -> Self {
        let mut np = Self::from_calibration(d);
        if let Some(overlay) = &d.true_rates {
            np.apply_overlay(overlay).expect("overlay checked when the device was loaded");
        }
        np
    }

    /// No errors of any kind.
    pub fn noiseless(d: &DeviceModel) -> Self {
        NoiseParams {
            cx_error: d.cx_error.keys().map(|&e| (e, 0.0)).collect(),
            readout_error: vec![0.0; d.num_qubits],
            depol_1q: 0.0,
            t1: d.t1.clone(),
            t2: d.t2.clone(),
            idle: false,
            drift: Vec::new(),
        }
    }

    fn apply_overlay(&mut self, overlay: &RateOverlay) -> Result<(), EmulatorError> {
        for (k, &p) in &overlay.cx_error {
            let e = parse_key(k)?;
            let slot = self
                .cx_error
                .get_mut(&e)
                .ok_or_else(|| EmulatorError::Params(format!("edge `{k}` is not coupled")))?;
            *slot = p;
        }
        if let Some(ro) = &overlay.readout_error {
            if ro.len() != self.readout_error.len() {
                return Err(EmulatorError::Params("readout_error length mismatch".into()));
            }
            self.readout_error = ro.clone();
        }
        if let Some(p) = overlay.sq_error {
            self.depol_1q = p;
        }
        Ok(())
    }

    /// Parse a noise file: a rate overlay on top of the device calibration
    /// plus an optional `drift` schedule.
    pub fn from_json(text: &str, d: &DeviceModel) -> Result<Self, EmulatorError> {
        let file: NoiseFile = serde_json::from_str(text).map_err(|e| IrError::Json(e.to_string()))?;
        let mut np = Self::from_calibration(d);
        np.apply_overlay(&file.rates)?;
        np.drift = file.drift;
        if let Some(idle) = file.idle {
            np.idle = idle;
        }
        np.check()?;
        Ok(np)
    }

    pub fn load(path: impl AsRef<Path>, d: &DeviceModel) -> Result<Self, EmulatorError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| IrError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, d)
    }

    pub fn to_json(&self) -> String {
        let file = NoiseFile {
            rates: RateOverlay {
                cx_error: self.cx_error.iter().map(|(&(a, b), &p)| (edge_key(a, b), p)).collect(),
                readout_error: Some(self.readout_error.clone()),
                sq_error: Some(self.depol_1q),
            },
            drift: self.drift.clone(),
            idle: Some(self.idle),
        };
        serde_json::to_string_pretty(&file).expect("noise parameters serialize")
    }

    pub fn check(&self) -> Result<(), EmulatorError> {
        let probs = self
            .cx_error
            .values()
            .chain(&self.readout_error)
            .chain(std::iter::once(&self.depol_1q));
        for &p in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(EmulatorError::Params(format!("probability {p} outside [0, 1]")));
            }
        }
        if let Some(&s) = self.drift.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
            return Err(EmulatorError::Params(format!("drift multiplier {s} must be finite and nonnegative")));
        }
        if self.t1.iter().chain(&self.t2).any(|&t| !(t > 0.0)) {
            return Err(EmulatorError::Params("t1 and t2 must be positive".into()));
        }
        Ok(())
    }

    /// Gate-error multiplier at `epoch`.
    pub fn drift_scale(&self, epoch: usize) -> Result<f64, EmulatorError> {
        if self.drift.is_empty() {
            return Ok(1.0);
        }
        self.drift.get(epoch).copied().ok_or(EmulatorError::Epoch {
            epoch,
            len: self.drift.len(),
        })
    }

    /// Scale the error on one edge, e.g. to build a poisoned-edge scenario.
    pub fn scale_edge(&mut self, a: usize, b: usize, factor: f64) {
        if let Some(p) = self.cx_error.get_mut(&(a.min(b), a.max(b))) {
            *p = (*p * factor).min(1.0);
        }
    }
}

fn parse_key(k: &str) -> Result<(usize, usize), EmulatorError> {
    let bad = || EmulatorError::Params(format!("bad edge key `{k}`"));
    let (a, b) = k.split_once('-').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    Ok((a.min(b), a.max(b)))
}

/// Pauli-twirled amplitude and phase damping over `len` dt, as `[pX, pY, pZ]`.
/// Per dt: pX = pY = 1/(4·t1), pZ = max(0, 1/(2·t2) − 1/(4·t1)); `len` steps
/// compose through the Pauli-channel eigenvalues.
pub fn idle_pauli_probs(len: u64, t1: f64, t2: f64) -> [f64; 3] {
    if len == 0 {
        return [0.0; 3];
    }
    let px = 1.0 / (4.0 * t1);
    let pz = (1.0 / (2.0 * t2) - 1.0 / (4.0 * t1)).max(0.0);
    let (px, py) = (px.min(1.0), px.min(1.0));
    let l = len as f64;
    let lx = (1.0 - 2.0 * (py + pz)).powf(l);
    let ly = (1.0 - 2.0 * (px + pz)).powf(l);
    let lz = (1.0 - 2.0 * (px + py)).powf(l);
    [
        ((1.0 + lx - ly - lz) / 4.0).max(0.0),
        ((1.0 - lx + ly - lz) / 4.0).max(0.0),
        ((1.0 - lx - ly + lz) / 4.0).max(0.0),
    ]
}
