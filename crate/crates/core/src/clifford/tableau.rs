//! Stabilizer tableau with destabilizer rows (Aaronson–Gottesman form).
//!
//! Rows `0..n` hold destabilizers, rows `n..2n` stabilizers and row `2n` is
//! scratch space for deterministic measurements. Each row packs its X and Z
//! bits into `u64` words; `phase[row]` is the sign bit.

use crate::ir::{quarter_turns, Circuit, Distribution, GateKind, Instruction};

use super::statevector::{compact_map, measurement_map, Pauli};
use super::SimError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    n: usize,
    words: usize,
    x: Vec<u64>,
    z: Vec<u64>,
    phase: Vec<u8>,
}

impl StabilizerTableau {
    /// Tableau of |0…0⟩.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let rows = 2 * n + 1;
        let mut t = StabilizerTableau {
            n,
            words,
            x: vec![0; rows * words],
            z: vec![0; rows * words],
            phase: vec![0; rows],
        };
        for q in 0..n {
            t.set_x(q, q, true);
            t.set_z(n + q, q, true);
        }
        t
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, row: usize, q: usize) -> (usize, u64) {
        (row * self.words + q / 64, 1u64 << (q % 64))
    }

    #[inline]
    pub fn x_bit(&self, row: usize, q: usize) -> bool {
        let (i, m) = self.idx(row, q);
        self.x[i] & m != 0
    }

    #[inline]
    pub fn z_bit(&self, row: usize, q: usize) -> bool {
        let (i, m) = self.idx(row, q);
        self.z[i] & m != 0
    }

    fn set_x(&mut self, row: usize, q: usize, v: bool) {
        let (i, m) = self.idx(row, q);
        if v {
            self.x[i] |= m
        } else {
            self.x[i] &= !m
        }
    }

    fn set_z(&mut self, row: usize, q: usize, v: bool) {
        let (i, m) = self.idx(row, q);
        if v {
            self.z[i] |= m
        } else {
            self.z[i] &= !m
        }
    }

    fn rows(&self) -> usize {
        2 * self.n
    }

    pub fn h(&mut self, q: usize) {
        for r in 0..self.rows() {
            let (xb, zb) = (self.x_bit(r, q), self.z_bit(r, q));
            self.phase[r] ^= (xb && zb) as u8;
            self.set_x(r, q, zb);
            self.set_z(r, q, xb);
        }
    }

    pub fn s(&mut self, q: usize) {
        for r in 0..self.rows() {
            let (xb, zb) = (self.x_bit(r, q), self.z_bit(r, q));
            self.phase[r] ^= (xb && zb) as u8;
            self.set_z(r, q, zb ^ xb);
        }
    }

    pub fn sdg(&mut self, q: usize) {
        for r in 0..self.rows() {
            let (xb, zb) = (self.x_bit(r, q), self.z_bit(r, q));
            self.phase[r] ^= (xb && !zb) as u8;
            self.set_z(r, q, zb ^ xb);
        }
    }

    pub fn cx(&mut self, c: usize, t: usize) {
        for r in 0..self.rows() {
            let (xc, zc, xt, zt) = (self.x_bit(r, c), self.z_bit(r, c), self.x_bit(r, t), self.z_bit(r, t));
            self.phase[r] ^= (xc && zt && (xt == zc)) as u8;
            self.set_x(r, t, xt ^ xc);
            self.set_z(r, c, zc ^ zt);
        }
    }

    /// Conjugate by a Pauli (only signs change).
    pub fn pauli(&mut self, q: usize, p: Pauli) {
        let (px, pz) = p.bits();
        for r in 0..self.rows() {
            // P anticommutes with the row's Pauli on q iff the symplectic product is 1
            let anti = (px && self.z_bit(r, q)) ^ (pz && self.x_bit(r, q));
            self.phase[r] ^= anti as u8;
        }
    }

    /// Apply `RZ(k·π/2)` as `S^k` (up to global phase).
    pub fn rz_quarter(&mut self, q: usize, k: u8) {
        match k % 4 {
            0 => {}
            1 => self.s(q),
            2 => self.pauli(q, Pauli::Z),
            _ => self.sdg(q),
        }
    }

    /// Apply a Clifford instruction through the dense map; measurements and
    /// timing directives are ignored.
    pub fn apply(&mut self, inst: &Instruction, map: &[usize], index: usize) -> Result<(), SimError> {
        let q = |i: usize| map[inst.qubits[i]];
        match inst.kind {
            GateKind::Measure | GateKind::Barrier | GateKind::Delay | GateKind::I => {}
            GateKind::X => self.pauli(q(0), Pauli::X),
            GateKind::Z => self.pauli(q(0), Pauli::Z),
            GateKind::H => self.h(q(0)),
            GateKind::S => self.s(q(0)),
            GateKind::SX => {
                self.sdg(q(0));
                self.h(q(0));
                self.sdg(q(0));
            }
            GateKind::RZ => {
                let k = quarter_turns(inst.param.unwrap_or_default()).ok_or(SimError::NonClifford { index })?;
                self.rz_quarter(q(0), k);
            }
            GateKind::CX => self.cx(q(0), q(1)),
            GateKind::SWAP => {
                self.cx(q(0), q(1));
                self.cx(q(1), q(0));
                self.cx(q(0), q(1));
            }
            GateKind::CCX => return Err(SimError::NonClifford { index }),
        }
        Ok(())
    }

    /// Phase exponent (mod 4) of i^g contributed when multiplying Paulis (x1,z1)·(x2,z2).
    fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
        match (x1, z1) {
            (false, false) => 0,
            (true, true) => z2 as i32 - x2 as i32,
            (true, false) => z2 as i32 * (2 * x2 as i32 - 1),
            (false, true) => x2 as i32 * (1 - 2 * z2 as i32),
        }
    }

    /// Row `h` ← row `h` · row `i`.
    fn rowsum(&mut self, h: usize, i: usize) {
        let mut sum = 2 * self.phase[h] as i32 + 2 * self.phase[i] as i32;
        for q in 0..self.n {
            sum += Self::g(self.x_bit(i, q), self.z_bit(i, q), self.x_bit(h, q), self.z_bit(h, q));
        }
        self.phase[h] = (sum.rem_euclid(4) / 2) as u8;
        for w in 0..self.words {
            self.x[h * self.words + w] ^= self.x[i * self.words + w];
            self.z[h * self.words + w] ^= self.z[i * self.words + w];
        }
    }

    fn copy_row(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            self.x[dst * self.words + w] = self.x[src * self.words + w];
            self.z[dst * self.words + w] = self.z[src * self.words + w];
        }
        self.phase[dst] = self.phase[src];
    }

    fn clear_row(&mut self, row: usize) {
        for w in 0..self.words {
            self.x[row * self.words + w] = 0;
            self.z[row * self.words + w] = 0;
        }
        self.phase[row] = 0;
    }

    /// Whether a Z-basis measurement of `q` has a random outcome.
    pub fn is_random(&self, q: usize) -> bool {
        (self.n..2 * self.n).any(|r| self.x_bit(r, q))
    }

    /// Measure `q` in the Z basis. A random outcome takes the value `choice`.
    /// Returns `(outcome, was_random)`.
    pub fn measure(&mut self, q: usize, choice: bool) -> (bool, bool) {
        let n = self.n;
        if let Some(p) = (n..2 * n).find(|&r| self.x_bit(r, q)) {
            for i in 0..2 * n {
                if i != p && self.x_bit(i, q) {
                    self.rowsum(i, p);
                }
            }
            self.copy_row(p - n, p);
            self.clear_row(p);
            self.set_z(p, q, true);
            self.phase[p] = choice as u8;
            (choice, true)
        } else {
            let scratch = 2 * n;
            self.clear_row(scratch);
            for i in 0..n {
                if self.x_bit(i, q) {
                    self.rowsum(scratch, i + n);
                }
            }
            (self.phase[scratch] == 1, false)
        }
    }
}

/// Outcome structure of terminal measurements on a stabilizer state: the
/// support is `offset ⊕ span(generators)`, uniformly weighted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSupport {
    pub width: usize,
    pub offset: u64,
    pub generators: Vec<u64>,
}

impl AffineSupport {
    pub fn peaks(&self) -> u64 {
        1u64 << self.generators.len()
    }

    /// Enumerate the support, failing above `max_bits` free generators.
    pub fn distribution(&self, max_bits: usize) -> Result<Distribution, SimError> {
        let k = self.generators.len();
        if k > max_bits {
            return Err(SimError::SupportTooLarge { free_bits: k });
        }
        let p = 1.0 / (1u64 << k) as f64;
        let pairs = (0..1u64 << k).map(|mask| {
            let v = self
                .generators
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(self.offset, |acc, (_, g)| acc ^ g);
            (v, p)
        });
        Ok(Distribution::from_pairs(self.width, pairs))
    }
}

/// Evolve the gates of a Clifford circuit, returning the tableau and the
/// dense measurement map.
pub(crate) fn evolve(c: &Circuit) -> Result<(StabilizerTableau, Vec<(usize, usize)>), SimError> {
    c.check()?;
    let (map, n) = compact_map(c);
    let mut tab = StabilizerTableau::new(n);
    for (index, inst) in c.instructions.iter().enumerate() {
        tab.apply(inst, &map, index)?;
    }
    Ok((tab, measurement_map(c, &map)))
}

/// Measure in order, resolving the `j`-th random outcome as `choices(j)`.
pub(crate) fn measure_all(
    mut tab: StabilizerTableau,
    meas: &[(usize, usize)],
    mut choice: impl FnMut(usize) -> bool,
) -> (u64, Vec<usize>) {
    let mut value = 0u64;
    let mut random_clbits = Vec::new();
    for &(q, cb) in meas {
        let (bit, random) = tab.measure(q, choice(random_clbits.len()));
        if random {
            random_clbits.push(cb);
        }
        value |= (bit as u64) << cb;
    }
    (value, random_clbits)
}

/// Affine structure of the measurement outcomes of a Clifford circuit.
pub fn clifford_support(c: &Circuit) -> Result<AffineSupport, SimError> {
    let (tab, meas) = evolve(c)?;
    let (offset, random) = measure_all(tab.clone(), &meas, |_| false);
    let generators = (0..random.len())
        .map(|j| measure_all(tab.clone(), &meas, |i| i == j).0 ^ offset)
        .collect();
    Ok(AffineSupport {
        width: c.num_clbits,
        offset,
        generators,
    })
}

/// Support bits above which exact enumeration is refused.
pub const MAX_SUPPORT_BITS: usize = 24;

/// Exact measurement distribution of a Clifford circuit.
pub fn stabilizer_simulate(c: &Circuit) -> Result<Distribution, SimError> {
    clifford_support(c)?.distribution(MAX_SUPPORT_BITS)
}
