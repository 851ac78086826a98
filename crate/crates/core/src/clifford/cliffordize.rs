use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ir::{canonical_angle, Circuit, GateKind};

use super::tableau::clifford_support;
use super::SimError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffordizeConfig {
    /// Half-width of the band around odd multiples of π/4 where rounding is randomized.
    pub delta: f64,
    pub max_attempts: usize,
    pub seed: u64,
}

impl Default for CliffordizeConfig {
    fn default() -> Self {
        CliffordizeConfig {
            delta: PI / 100.0,
            max_attempts: 100,
            seed: 0,
        }
    }
}

impl CliffordizeConfig {
    pub fn check(&self) -> Result<(), SimError> {
        if !(self.delta > 0.0 && self.delta < FRAC_PI_4) {
            return Err(SimError::Config(format!("delta {} outside (0, π/4)", self.delta)));
        }
        if self.max_attempts == 0 {
            return Err(SimError::Config("max_attempts must be at least 1".into()));
        }
        Ok(())
    }
}

/// How one RZ angle maps to a Clifford angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AngleRounding {
    /// Deterministic: nearest multiple of π/2, as quarter turns.
    Nearest(u8),
    /// Within δ of `n·π/4` for odd `n`: choose `(n−1)·π/4` or `(n+1)·π/4`.
    Band(u8),
}

impl AngleRounding {
    pub fn classify(theta: f64, delta: f64) -> Self {
        let t = canonical_angle(theta);
        let n = (t / FRAC_PI_4).round();
        if (n as i64) % 2 == 1 && (t - n * FRAC_PI_4).abs() < delta {
            return AngleRounding::Band(n as u8);
        }
        AngleRounding::Nearest(((t / FRAC_PI_2).round() as i64).rem_euclid(4) as u8)
    }

    /// Quarter turns for this rounding; `up` picks the upper neighbour in a band.
    pub fn quarter_turns(self, up: bool) -> u8 {
        match self {
            AngleRounding::Nearest(k) => k,
            AngleRounding::Band(n) => (if up { (n + 1) / 2 } else { (n - 1) / 2 }) % 4,
        }
    }
}

/// A Clifford proxy of a transpiled circuit.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordDummy {
    pub circuit: Circuit,
    /// Support size of the proxy's ideal output distribution.
    pub peaks: u64,
    pub attempts: usize,
}

/// Replace every RZ angle with a multiple of π/2, searching randomized
/// roundings for a proxy whose ideal distribution has `target_peaks` outcomes.
pub fn cliffordize(c: &Circuit, target_peaks: u64, cfg: &CliffordizeConfig) -> Result<CliffordDummy, SimError> {
    cfg.check()?;
    let mut roundings = Vec::new();
    for (index, inst) in c.instructions.iter().enumerate() {
        match inst.kind {
            GateKind::I
            | GateKind::X
            | GateKind::SX
            | GateKind::CX
            | GateKind::Measure
            | GateKind::Delay
            | GateKind::Barrier => {}
            GateKind::RZ => roundings.push((index, AngleRounding::classify(inst.param.unwrap_or_default(), cfg.delta))),
            kind => return Err(SimError::NonBasisGate(kind)),
        }
    }
    let banded = roundings.iter().filter(|(_, r)| matches!(r, AngleRounding::Band(_))).count();
    let attempts = if banded == 0 { 1 } else { cfg.max_attempts };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<CliffordDummy> = None;
    for attempt in 1..=attempts {
        let mut dummy = c.clone();
        for &(index, rounding) in &roundings {
            let up = matches!(rounding, AngleRounding::Band(_)) && rng.gen::<bool>();
            let k = rounding.quarter_turns(up);
            dummy.instructions[index].param = Some(canonical_angle(k as f64 * FRAC_PI_2));
        }
        let peaks = clifford_support(&dummy)?.peaks();
        let candidate = CliffordDummy {
            circuit: dummy,
            peaks,
            attempts: attempt,
        };
        if peaks == target_peaks {
            return Ok(candidate);
        }
        let better = best
            .as_ref()
            .is_none_or(|b| peaks.abs_diff(target_peaks) < b.peaks.abs_diff(target_peaks));
        if better {
            best = Some(candidate);
        }
    }
    let mut best = best.expect("at least one attempt");
    best.attempts = attempts;
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::circuit_stats;

    fn cfg(seed: u64) -> CliffordizeConfig {
        CliffordizeConfig { seed, ..Default::default() }
    }

    #[test]
    fn nearest_rounding() {
        assert_eq!(AngleRounding::classify(PI / 3.0, PI / 100.0), AngleRounding::Nearest(1));
        assert_eq!(AngleRounding::classify(0.1, PI / 100.0), AngleRounding::Nearest(0));
        assert_eq!(AngleRounding::classify(2.0 * PI - 0.1, PI / 100.0), AngleRounding::Nearest(0));
        assert_eq!(AngleRounding::classify(PI / 4.0, PI / 100.0), AngleRounding::Band(1));
        assert_eq!(AngleRounding::classify(7.0 * PI / 4.0, PI / 100.0), AngleRounding::Band(7));
        assert_eq!(AngleRounding::Band(7).quarter_turns(true), 0);
        assert_eq!(AngleRounding::Band(7).quarter_turns(false), 3);
    }

    #[test]
    fn band_edge_uses_nearest() {
        let delta = 0.05;
        // strictly inside the band
        assert!(matches!(AngleRounding::classify(PI / 4.0 + 0.049, delta), AngleRounding::Band(1)));
        // just outside: nearest multiple of π/2
        assert_eq!(AngleRounding::classify(PI / 4.0 + 0.051, delta), AngleRounding::Nearest(1));
        assert_eq!(AngleRounding::classify(PI / 4.0 - 0.051, delta), AngleRounding::Nearest(0));
    }

    #[test]
    fn pi_over_three_goes_to_half_pi() {
        let mut c = Circuit::new(1, 1);
        c.rz(PI / 3.0, 0).measure(0, 0);
        let d = cliffordize(&c, 1, &cfg(0)).unwrap();
        assert_eq!(d.circuit.instructions[0].param, Some(FRAC_PI_2));
        assert_eq!(d.attempts, 1);
    }

    #[test]
    fn pi_over_four_choice_varies_across_seeds() {
        let mut c = Circuit::new(1, 1);
        c.sx(0).rz(PI / 4.0, 0).sx(0).measure(0, 0);
        let mut seen = std::collections::BTreeSet::new();
        for seed in 0..32 {
            // target 3 peaks is unreachable, so the first attempt is kept
            let d = cliffordize(&c, 3, &CliffordizeConfig { max_attempts: 1, ..cfg(seed) }).unwrap();
            let k = (d.circuit.instructions[1].param.unwrap() / FRAC_PI_2).round() as u8;
            seen.insert(k);
        }
        assert_eq!(seen, [0, 1].into());
    }

    #[test]
    fn clifford_input_is_fixed_point() {
        let mut c = Circuit::new(2, 2);
        c.rz(FRAC_PI_2, 0).sx(0).cx(0, 1).rz(PI, 1).measure_all();
        let d = cliffordize(&c, 2, &cfg(9)).unwrap();
        assert_eq!(d.circuit, c);
        assert_eq!(d.attempts, 1);
        assert_eq!(d.peaks, 2);
    }

    #[test]
    fn searches_for_matching_peak_count() {
        // sx · rz(π/4) · sx → peaks 2 when rounded to π/2 (|+i⟩ style), 1 when rounded to 0
        let mut c = Circuit::new(1, 1);
        c.sx(0).rz(PI / 4.0, 0).sx(0).measure(0, 0);
        for target in [1, 2] {
            let d = cliffordize(&c, target, &cfg(5)).unwrap();
            assert_eq!(d.peaks, target);
        }
    }

    #[test]
    fn structure_preserved() {
        let mut c = Circuit::new(2, 2);
        c.rz(0.3, 0).sx(0).cx(0, 1).rz(2.2, 1).rz(PI / 4.0 + 0.01, 0).cx(1, 0).measure_all();
        let d = cliffordize(&c, 4, &cfg(1)).unwrap();
        let (a, b) = (circuit_stats(&c), circuit_stats(&d.circuit));
        assert_eq!((a.cx_count, a.depth, a.total_gates), (b.cx_count, b.depth, b.total_gates));
        assert_eq!(b.non_clifford, 0);
    }

    #[test]
    fn rejects_non_basis() {
        let mut c = Circuit::new(1, 0);
        c.h(0);
        assert_eq!(cliffordize(&c, 1, &cfg(0)), Err(SimError::NonBasisGate(GateKind::H)));
        assert!(matches!(
            cliffordize(&c, 1, &CliffordizeConfig { delta: 1.0, ..cfg(0) }),
            Err(SimError::Config(_))
        ));
    }
}
