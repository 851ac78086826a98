use serde::{Deserialize, Serialize};

use crate::clifford::count_peaks;
use crate::ir::{Counts, Distribution};

use super::SelectorError;

/// Fraction of shots that land in the support of the ideal distribution.
pub fn pst(counts: &Counts, ideal: &Distribution) -> Result<f64, SelectorError> {
    if counts.width != ideal.width {
        return Err(SelectorError::WidthMismatch {
            counts: counts.width,
            ideal: ideal.width,
        });
    }
    let shots = counts.shots();
    if shots == 0 {
        return Err(SelectorError::EmptyCounts);
    }
    let hits: u64 = counts
        .counts
        .iter()
        .filter(|(&k, _)| ideal.contains(k))
        .map(|(_, &n)| n)
        .sum();
    Ok(hits as f64 / shots as f64)
}

/// Shots allotted to a proxy: a fixed number per peak of its ideal output.
pub fn shot_budget(ideal_dummy: &Distribution, shots_per_peak: u64) -> u64 {
    shots_per_peak * count_peaks(ideal_dummy)
}

/// A fidelity ratio against the oracle, clamped at 1 with the raw value kept.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeFidelity {
    pub value: f64,
    pub raw: f64,
}

pub fn fidelity_relative_to_oracle(m_pst: f64, oracle_pst: f64) -> Result<RelativeFidelity, SelectorError> {
    if !(oracle_pst > 0.0) {
        return Err(SelectorError::ZeroOracle);
    }
    let raw = m_pst / oracle_pst;
    Ok(RelativeFidelity {
        value: raw.min(1.0),
        raw,
    })
}

/// Pearson correlation of two samples, in percent.
pub fn correlation(xs: &[f64], ys: &[f64]) -> Result<f64, SelectorError> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(SelectorError::Degenerate(format!(
            "need two samples of equal length ≥ 3, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx <= f64::EPSILON * n || syy <= f64::EPSILON * n {
        return Err(SelectorError::Degenerate("zero variance".into()));
    }
    Ok(100.0 * sxy / (sxx * syy).sqrt())
}
