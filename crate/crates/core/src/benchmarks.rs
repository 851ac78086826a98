//! Benchmark circuit generators.
//!
//! Families are parameterized by size; every generator returns a circuit that
//! measures its result register into clbits `0..`.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ir::Circuit;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BenchmarkError {
    #[error("invalid benchmark spec: {0}")]
    Invalid(String),
    #[error("unknown benchmark `{0}`")]
    UnknownName(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, BenchmarkError> {
    Err(BenchmarkError::Invalid(msg.into()))
}

fn default_gammas() -> Vec<f64> {
    vec![0.8]
}

fn default_betas() -> Vec<f64> {
    vec![0.4]
}

/// Parameters of one generated benchmark.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum BenchmarkSpec {
    /// Bernstein-Vazirani over `secret` (MSB first) plus one oracle qubit.
    Bv { secret: String },
    /// `H` followed by a CX chain.
    Ghz { qubits: usize },
    /// MaxCut ansatz; `edges` defaults to a ring over `qubits`.
    Qaoa {
        qubits: usize,
        #[serde(default)]
        edges: Option<Vec<(usize, usize)>>,
        #[serde(default = "default_gammas")]
        gammas: Vec<f64>,
        #[serde(default = "default_betas")]
        betas: Vec<f64>,
    },
    /// Ripple-carry adder computing `a + b` on `bits`-bit operands.
    Adder {
        bits: usize,
        #[serde(default)]
        a: Option<u64>,
        #[serde(default)]
        b: Option<u64>,
    },
    /// Multi-controlled X with clean ancillas, all controls set.
    Cnx { controls: usize },
    /// Multi-controlled X borrowing dirty ancillas, all controls set.
    Cnxdirty { controls: usize },
    /// Phase estimation of `phase` (in turns) with `counting` readout qubits.
    Pea {
        counting: usize,
        #[serde(default)]
        phase: Option<f64>,
    },
}

impl BenchmarkSpec {
    pub fn family(&self) -> &'static str {
        match self {
            BenchmarkSpec::Bv { .. } => "bv",
            BenchmarkSpec::Ghz { .. } => "ghz",
            BenchmarkSpec::Qaoa { .. } => "qaoa",
            BenchmarkSpec::Adder { .. } => "adder",
            BenchmarkSpec::Cnx { .. } => "cnx",
            BenchmarkSpec::Cnxdirty { .. } => "cnxdirty",
            BenchmarkSpec::Pea { .. } => "pea",
        }
    }

    /// Total qubits of the generated circuit.
    pub fn num_qubits(&self) -> usize {
        match self {
            BenchmarkSpec::Bv { secret } => secret.len() + 1,
            BenchmarkSpec::Ghz { qubits } | BenchmarkSpec::Qaoa { qubits, .. } => *qubits,
            BenchmarkSpec::Adder { bits, .. } => 2 * bits + 2,
            BenchmarkSpec::Cnx { controls } | BenchmarkSpec::Cnxdirty { controls } => {
                if *controls <= 2 {
                    controls + 1
                } else {
                    2 * controls - 1
                }
            }
            BenchmarkSpec::Pea { counting, .. } => counting + 1,
        }
    }

    /// Family name followed by the qubit count, e.g. `ghz12`.
    pub fn name(&self) -> String {
        format!("{}{}", self.family(), self.num_qubits())
    }

    /// Default spec for a family at a total qubit count.
    pub fn from_family(family: &str, qubits: usize) -> Result<Self, BenchmarkError> {
        let spec = match family {
            "bv" if qubits >= 2 => BenchmarkSpec::Bv {
                secret: (0..qubits - 1).map(|i| if i % 2 == 0 { '1' } else { '0' }).collect(),
            },
            "ghz" if qubits >= 1 => BenchmarkSpec::Ghz { qubits },
            "qaoa" if qubits >= 2 => BenchmarkSpec::Qaoa {
                qubits,
                edges: None,
                gammas: default_gammas(),
                betas: default_betas(),
            },
            "adder" if qubits >= 4 && qubits % 2 == 0 => BenchmarkSpec::Adder {
                bits: (qubits - 2) / 2,
                a: None,
                b: None,
            },
            "cnx" | "cnxdirty" if qubits >= 3 => {
                let controls = if qubits == 3 {
                    2
                } else if qubits % 2 == 1 {
                    (qubits + 1) / 2
                } else {
                    return Err(BenchmarkError::UnknownName(format!("{family}{qubits}")));
                };
                if family == "cnx" {
                    BenchmarkSpec::Cnx { controls }
                } else {
                    BenchmarkSpec::Cnxdirty { controls }
                }
            }
            "pea" if qubits >= 2 => BenchmarkSpec::Pea {
                counting: qubits - 1,
                phase: None,
            },
            _ => return Err(BenchmarkError::UnknownName(format!("{family}{qubits}"))),
        };
        Ok(spec)
    }

    /// Support size of the ideal output where it is known without simulation.
    pub fn ideal_peaks(&self) -> Option<u64> {
        match self {
            BenchmarkSpec::Ghz { qubits } => Some(if *qubits == 0 { 1 } else { 2 }),
            BenchmarkSpec::Qaoa { .. } => None,
            _ => self.expected_outcome().map(|_| 1),
        }
    }

    /// Ideal outcome for the deterministic families.
    pub fn expected_outcome(&self) -> Option<u64> {
        match self {
            BenchmarkSpec::Bv { secret } => u64::from_str_radix(secret, 2).ok(),
            BenchmarkSpec::Adder { bits, a, b } => {
                let (a, b) = adder_operands(*bits, *a, *b);
                Some(a + b)
            }
            BenchmarkSpec::Cnx { controls } | BenchmarkSpec::Cnxdirty { controls } => {
                let n = self.num_qubits();
                let controls_mask = (1u64 << controls) - 1;
                let target = 1u64 << (n - 1);
                let dirty = match self {
                    BenchmarkSpec::Cnxdirty { .. } => dirty_pattern(*controls)
                        .iter()
                        .enumerate()
                        .filter(|(_, &set)| set)
                        .map(|(i, _)| 1u64 << (controls + i))
                        .sum(),
                    _ => 0,
                };
                Some(controls_mask | target | dirty)
            }
            BenchmarkSpec::Pea { counting, phase } => {
                let phase = phase.unwrap_or_else(|| default_phase(*counting));
                let scaled = phase * (1u64 << counting) as f64;
                (scaled.fract().abs() < 1e-12).then(|| scaled as u64 % (1u64 << counting))
            }
            BenchmarkSpec::Ghz { .. } | BenchmarkSpec::Qaoa { .. } => None,
        }
    }
}

impl fmt::Display for BenchmarkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for BenchmarkSpec {
    type Err = BenchmarkError;

    /// Parses names like `bv8` or `cnxdirty7` into default specs.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
        let (family, digits) = s.split_at(split);
        let qubits = digits
            .parse()
            .map_err(|_| BenchmarkError::UnknownName(s.to_string()))?;
        BenchmarkSpec::from_family(&family.to_ascii_lowercase(), qubits)
    }
}

fn adder_operands(bits: usize, a: Option<u64>, b: Option<u64>) -> (u64, u64) {
    // all-ones plus one ripples a carry through every stage
    (a.unwrap_or(1), b.unwrap_or((1u64 << bits) - 1))
}

fn default_phase(counting: usize) -> f64 {
    // odd numerator keeps the finest controlled phase non-Clifford
    let denom = 1u64 << counting;
    (denom / 2 - 1).max(1) as f64 / denom as f64
}

fn dirty_pattern(controls: usize) -> Vec<bool> {
    (0..controls.saturating_sub(2)).map(|i| i % 2 == 0).collect()
}

/// Build the circuit described by `spec`.
pub fn gen_benchmark(spec: &BenchmarkSpec) -> Result<Circuit, BenchmarkError> {
    match spec {
        BenchmarkSpec::Bv { secret } => bv(secret),
        BenchmarkSpec::Ghz { qubits } => ghz(*qubits),
        BenchmarkSpec::Qaoa {
            qubits,
            edges,
            gammas,
            betas,
        } => {
            let ring: Vec<(usize, usize)>;
            let edges = match edges {
                Some(e) => e.as_slice(),
                None => {
                    ring = ring_edges(*qubits);
                    &ring
                }
            };
            qaoa(*qubits, edges, gammas, betas)
        }
        BenchmarkSpec::Adder { bits, a, b } => {
            let (a, b) = adder_operands(*bits, *a, *b);
            adder(*bits, a, b)
        }
        BenchmarkSpec::Cnx { controls } => cnx(*controls),
        BenchmarkSpec::Cnxdirty { controls } => cnx_dirty(*controls, &dirty_pattern(*controls)),
        BenchmarkSpec::Pea { counting, phase } => pea(*counting, phase.unwrap_or_else(|| default_phase(*counting))),
    }
}

/// Bernstein-Vazirani; the oracle qubit is the last one.
pub fn bv(secret: &str) -> Result<Circuit, BenchmarkError> {
    let n = secret.len();
    if n == 0 || n > 63 || !secret.bytes().all(|b| b == b'0' || b == b'1') {
        return invalid(format!("secret `{secret}` must be a nonempty bitstring"));
    }
    let mut c = Circuit::new(n + 1, n);
    c.x(n).h(n);
    for q in 0..n {
        c.h(q);
    }
    // secret is MSB first, qubit i carries bit i
    for (i, bit) in secret.bytes().rev().enumerate() {
        if bit == b'1' {
            c.cx(i, n);
        }
    }
    for q in 0..n {
        c.h(q);
    }
    for q in 0..n {
        c.measure(q, q);
    }
    Ok(c)
}

pub fn ghz(qubits: usize) -> Result<Circuit, BenchmarkError> {
    if qubits == 0 {
        return invalid("ghz needs at least one qubit");
    }
    let mut c = Circuit::new(qubits, qubits);
    c.h(0);
    for q in 1..qubits {
        c.cx(q - 1, q);
    }
    c.measure_all();
    Ok(c)
}

pub fn ring_edges(qubits: usize) -> Vec<(usize, usize)> {
    match qubits {
        0 | 1 => vec![],
        2 => vec![(0, 1)],
        n => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

pub fn qaoa(qubits: usize, edges: &[(usize, usize)], gammas: &[f64], betas: &[f64]) -> Result<Circuit, BenchmarkError> {
    if qubits < 2 {
        return invalid("qaoa needs at least two qubits");
    }
    if gammas.is_empty() || gammas.len() != betas.len() {
        return invalid("qaoa needs one gamma and one beta per layer");
    }
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a == b || a >= qubits || b >= qubits) {
        return invalid(format!("bad qaoa edge ({a}, {b})"));
    }
    let mut c = Circuit::new(qubits, qubits);
    for q in 0..qubits {
        c.h(q);
    }
    for (&gamma, &beta) in gammas.iter().zip(betas) {
        for &(a, b) in edges {
            c.cx(a, b).rz(2.0 * gamma, b).cx(a, b);
        }
        for q in 0..qubits {
            c.h(q).rz(2.0 * beta, q).h(q);
        }
    }
    c.measure_all();
    Ok(c)
}

fn maj(c: &mut Circuit, x: usize, y: usize, z: usize) {
    c.cx(z, y).cx(z, x).ccx(x, y, z);
}

fn uma(c: &mut Circuit, x: usize, y: usize, z: usize) {
    c.ccx(x, y, z).cx(z, x).cx(x, y);
}

/// In-place ripple-carry adder. Qubit 0 is the carry in, `a_i` sits at
/// `2i + 1`, `b_i` at `2i + 2` and the carry out last. Measures `b` and the
/// carry out, so the outcome is `a + b`.
pub fn adder(bits: usize, a: u64, b: u64) -> Result<Circuit, BenchmarkError> {
    if bits == 0 || bits > 30 {
        return invalid("adder width must be in 1..=30");
    }
    if a >> bits != 0 || b >> bits != 0 {
        return invalid(format!("operands {a} and {b} exceed {bits} bits"));
    }
    let qa = |i: usize| 2 * i + 1;
    let qb = |i: usize| 2 * i + 2;
    let cout = 2 * bits + 1;
    let mut c = Circuit::new(2 * bits + 2, bits + 1);
    for i in 0..bits {
        if a >> i & 1 == 1 {
            c.x(qa(i));
        }
        if b >> i & 1 == 1 {
            c.x(qb(i));
        }
    }
    maj(&mut c, 0, qb(0), qa(0));
    for i in 1..bits {
        maj(&mut c, qa(i - 1), qb(i), qa(i));
    }
    c.cx(qa(bits - 1), cout);
    for i in (1..bits).rev() {
        uma(&mut c, qa(i - 1), qb(i), qa(i));
    }
    uma(&mut c, 0, qb(0), qa(0));
    for i in 0..bits {
        c.measure(qb(i), i);
    }
    c.measure(cout, bits);
    Ok(c)
}

/// Toffoli ladder through clean ancillas. Controls come first, then the
/// `controls - 2` ancillas, then the target.
pub fn cnx(controls: usize) -> Result<Circuit, BenchmarkError> {
    if controls < 2 {
        return invalid("cnx needs at least two controls");
    }
    let n = if controls == 2 { 3 } else { 2 * controls - 1 };
    let target = n - 1;
    let anc = |i: usize| controls + i;
    let mut c = Circuit::new(n, n);
    for q in 0..controls {
        c.x(q);
    }
    if controls == 2 {
        c.ccx(0, 1, target);
    } else {
        let mut ladder = vec![(0, 1, anc(0))];
        for i in 2..controls - 1 {
            ladder.push((i, anc(i - 2), anc(i - 1)));
        }
        for &(x, y, z) in &ladder {
            c.ccx(x, y, z);
        }
        c.ccx(controls - 1, anc(controls - 3), target);
        for &(x, y, z) in ladder.iter().rev() {
            c.ccx(x, y, z);
        }
    }
    c.measure_all();
    Ok(c)
}

/// Multi-controlled X borrowing `controls - 2` ancillas in an arbitrary
/// state; `dirty[i]` sets ancilla `i` before the gate. Layout as [`cnx`].
pub fn cnx_dirty(controls: usize, dirty: &[bool]) -> Result<Circuit, BenchmarkError> {
    if controls < 2 {
        return invalid("cnxdirty needs at least two controls");
    }
    let n = if controls == 2 { 3 } else { 2 * controls - 1 };
    if dirty.len() != n - controls - 1 {
        return invalid(format!("expected {} ancilla flags, got {}", n - controls - 1, dirty.len()));
    }
    let target = n - 1;
    let anc = |i: usize| controls + i;
    let mut c = Circuit::new(n, n);
    for q in 0..controls {
        c.x(q);
    }
    for (i, &set) in dirty.iter().enumerate() {
        if set {
            c.x(anc(i));
        }
    }
    if controls == 2 {
        c.ccx(0, 1, target);
    } else {
        let m = controls;
        let top = (m - 1, anc(m - 3), target);
        let mut down = Vec::new();
        for i in (2..m - 1).rev() {
            down.push((i, anc(i - 2), anc(i - 1)));
        }
        let mut half = down.clone();
        half.push((0, 1, anc(0)));
        half.extend(down.iter().rev());
        let mut seq = vec![top];
        seq.extend(&half);
        seq.push(top);
        seq.extend(&half);
        for (x, y, z) in seq {
            c.ccx(x, y, z);
        }
    }
    c.measure_all();
    Ok(c)
}

fn controlled_phase(c: &mut Circuit, theta: f64, ctrl: usize, tgt: usize) {
    c.rz(theta / 2.0, ctrl)
        .cx(ctrl, tgt)
        .rz(-theta / 2.0, tgt)
        .cx(ctrl, tgt)
        .rz(theta / 2.0, tgt);
}

/// Phase estimation of a `phase`-turn eigenvalue on one eigenstate qubit.
/// Counting qubit `k` controls `U^(2^k)`; the estimate reads out MSB first.
pub fn pea(counting: usize, phase: f64) -> Result<Circuit, BenchmarkError> {
    if counting == 0 || counting > 20 {
        return invalid("pea needs 1..=20 counting qubits");
    }
    if !phase.is_finite() {
        return invalid("phase must be finite");
    }
    let eig = counting;
    let mut c = Circuit::new(counting + 1, counting);
    c.x(eig);
    for k in 0..counting {
        c.h(k);
    }
    for k in 0..counting {
        let theta = (TAU * phase * (1u64 << k) as f64).rem_euclid(TAU);
        controlled_phase(&mut c, theta, k, eig);
    }
    // inverse QFT without the reversal swaps; the measurement order absorbs it
    for k in (0..counting).rev() {
        for j in k + 1..counting {
            controlled_phase(&mut c, -PI / (1u64 << (j - k)) as f64, j, k);
        }
        c.h(k);
    }
    for k in 0..counting {
        c.measure(k, counting - 1 - k);
    }
    Ok(c)
}

/// Eight benchmarks of at most ten qubits covering every family.
pub fn small_suite() -> Vec<BenchmarkSpec> {
    ["bv6", "ghz5", "qaoa4", "adder6", "cnx5", "cnxdirty5", "pea4", "bv4"]
        .iter()
        .map(|n| n.parse().expect("suite names are valid"))
        .collect()
}
