use num_complex::Complex;
use num_traits::Float;

use crate::ir::{Circuit, Distribution, GateKind, Instruction};

use super::SimError;

/// Single-qubit Pauli operator.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Index order I, X, Y, Z.
    pub fn from_index(i: u8) -> Pauli {
        match i & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    /// (x, z) symplectic bits.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

pub type Matrix2<T> = [[Complex<T>; 2]; 2];

fn c<T: Float>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::from(re).unwrap(), T::from(im).unwrap())
}

/// 2×2 unitary of a single-qubit gate.
pub fn gate_matrix<T: Float>(kind: GateKind, param: Option<f64>) -> Option<Matrix2<T>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let m = match kind {
        GateKind::I => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(1., 0.)]],
        GateKind::X => [[c(0., 0.), c(1., 0.)], [c(1., 0.), c(0., 0.)]],
        GateKind::SX => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::H => [[c(s, 0.), c(s, 0.)], [c(s, 0.), c(-s, 0.)]],
        GateKind::S => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(0., 1.)]],
        GateKind::Z => [[c(1., 0.), c(0., 0.)], [c(0., 0.), c(-1., 0.)]],
        GateKind::RZ => {
            let h = param? / 2.0;
            [[c(h.cos(), -h.sin()), c(0., 0.)], [c(0., 0.), c(h.cos(), h.sin())]]
        }
        _ => return None,
    };
    Some(m)
}

pub fn pauli_matrix<T: Float>(p: Pauli) -> Matrix2<T> {
    match p {
        Pauli::I => gate_matrix(GateKind::I, None).unwrap(),
        Pauli::X => gate_matrix(GateKind::X, None).unwrap(),
        Pauli::Z => gate_matrix(GateKind::Z, None).unwrap(),
        Pauli::Y => [[c(0., 0.), c(0., -1.)], [c(0., 1.), c(0., 0.)]],
    }
}

/// Dense state of `n` qubits; qubit `q` is bit `q` of the basis index.
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector<T> {
    n: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Float> Statevector<T> {
    /// |0…0⟩.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
        amps[index] = Complex::new(T::one(), T::zero());
        Statevector { n, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn apply_matrix(&mut self, q: usize, m: &Matrix2<T>) {
        let bit = 1usize << q;
        for base in 0..self.amps.len() {
            if base & bit != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[base], self.amps[base | bit]);
            self.amps[base] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[base | bit] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let bit = 1usize << q;
        match p {
            Pauli::I => {}
            Pauli::X => {
                for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
                    self.amps.swap(i, i | bit);
                }
            }
            Pauli::Z => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Pauli::Y => self.apply_matrix(q, &pauli_matrix(Pauli::Y)),
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    pub fn apply_ccx(&mut self, a: usize, b: usize, target: usize) {
        let (ab, bb, tb) = (1usize << a, 1usize << b, 1usize << target);
        for i in 0..self.amps.len() {
            if i & ab != 0 && i & bb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
    }

    pub fn apply_swap(&mut self, a: usize, b: usize) {
        let (ab, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ab != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ab) | bb);
            }
        }
    }

    /// Apply a unitary instruction; directives are no-ops.
    pub fn apply(&mut self, inst: &Instruction, map: &[usize]) -> Result<(), SimError> {
        let q = |i: usize| map[inst.qubits[i]];
        match inst.kind {
            GateKind::Measure | GateKind::Barrier | GateKind::Delay => {}
            GateKind::CX => self.apply_cx(q(0), q(1)),
            GateKind::CCX => self.apply_ccx(q(0), q(1), q(2)),
            GateKind::SWAP => self.apply_swap(q(0), q(1)),
            kind => {
                let m = gate_matrix(kind, inst.param).ok_or(SimError::Unsupported(kind))?;
                self.apply_matrix(q(0), &m);
            }
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn inner(&self, other: &Statevector<T>) -> Complex<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }
}

/// Map from circuit qubits to dense simulator indices covering only the active qubits.
pub(crate) fn compact_map(c: &Circuit) -> (Vec<usize>, usize) {
    let active = c.active_qubits();
    let mut map = vec![usize::MAX; c.num_qubits];
    for (i, &q) in active.iter().enumerate() {
        map[q] = i;
    }
    (map, active.len())
}

/// `(dense qubit, clbit)` pairs of the terminal measurements.
pub(crate) fn measurement_map(c: &Circuit, map: &[usize]) -> Vec<(usize, usize)> {
    c.instructions
        .iter()
        .filter(|i| i.kind == GateKind::Measure)
        .map(|i| (map[i.qubits[0]], i.clbit.unwrap_or_default()))
        .collect()
}

/// Marginal distribution of measured qubits from basis-state probabilities.
pub(crate) fn marginalize(probs: impl Iterator<Item = (usize, f64)>, meas: &[(usize, usize)], width: usize) -> Distribution {
    let mut acc = std::collections::BTreeMap::new();
    for (index, p) in probs {
        if p <= 0.0 {
            continue;
        }
        let key = meas
            .iter()
            .fold(0u64, |k, &(q, cb)| k | (((index >> q) & 1) as u64) << cb);
        *acc.entry(key).or_insert(0.0) += p;
    }
    Distribution::from_pairs(width, acc.into_iter().filter(|&(_, p)| p > 1e-14))
}

/// Exact noiseless measurement distribution by dense state evolution at precision `T`.
pub fn statevector_simulate_with<T: Float>(c: &Circuit, max_qubits: usize) -> Result<Distribution, SimError> {
    c.check()?;
    let (map, n) = compact_map(c);
    if n > max_qubits {
        return Err(SimError::TooManyQubits { qubits: n, max: max_qubits });
    }
    let mut sv = Statevector::<T>::zero(n);
    for inst in &c.instructions {
        sv.apply(inst, &map)?;
    }
    let meas = measurement_map(c, &map);
    let probs = sv.probabilities();
    Ok(marginalize(
        probs.iter().enumerate().map(|(i, p)| (i, p.to_f64().unwrap_or(0.0))),
        &meas,
        c.num_clbits,
    ))
}

/// Default qubit cap for dense simulation.
pub const MAX_STATEVECTOR_QUBITS: usize = 20;

/// Exact noiseless distribution in double precision.
pub fn statevector_simulate(c: &Circuit, max_qubits: usize) -> Result<Distribution, SimError> {
    statevector_simulate_with::<f64>(c, max_qubits)
}
