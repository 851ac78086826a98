use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::ir::{Circuit, DeviceModel, GateKind, Instruction};
use crate::rng;

use super::layout::Layout;
use super::{PassError, SabreConfig};

/// A routed circuit over physical qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Routed {
    /// Circuit with `layout` and `final_layout` filled in; SWAPs not yet expanded.
    pub circuit: Circuit,
    pub swaps: usize,
    /// Final position of every virtual qubit, ancillas included.
    pub final_v2p: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(super) enum RouteMethod {
    Basic,
    Sabre(SabreConfig),
    /// Deterministic lookahead search without decay.
    Lookahead(usize),
}

/// Routing cost of a gate on physical qubits: zero iff executable.
/// Two-qubit gates need an edge; three-qubit gates a centre adjacent to both others.
fn cost(d: &DeviceModel, ps: &[usize]) -> u32 {
    match ps.len() {
        2 => d.distance(ps[0], ps[1]) - 1,
        3 => (0..3).map(|c| center_cost(d, ps, c)).min().unwrap(),
        _ => 0,
    }
}

fn center_cost(d: &DeviceModel, ps: &[usize], c: usize) -> u32 {
    (0..3)
        .filter(|&i| i != c)
        .map(|i| d.distance(ps[c], ps[i]) - 1)
        .sum()
}

struct State<'a> {
    d: &'a DeviceModel,
    v2p: Vec<usize>,
    p2v: Vec<usize>,
    out: Vec<Instruction>,
    swaps: usize,
}

impl<'a> State<'a> {
    fn new(d: &'a DeviceModel, v2p: Vec<usize>) -> Self {
        let mut p2v = vec![usize::MAX; d.num_qubits];
        for (v, &p) in v2p.iter().enumerate() {
            p2v[p] = v;
        }
        State {
            d,
            v2p,
            p2v,
            out: Vec::new(),
            swaps: 0,
        }
    }

    fn phys(&self, qubits: &[usize]) -> Vec<usize> {
        qubits.iter().map(|&v| self.v2p[v]).collect()
    }

    fn gate_cost(&self, inst: &Instruction) -> u32 {
        if inst.kind.is_multi_qubit_gate() {
            cost(self.d, &self.phys(&inst.qubits))
        } else {
            0
        }
    }

    /// Exchange the virtual qubits on physical `a` and `b` without emitting anything.
    fn permute(&mut self, a: usize, b: usize) {
        let (va, vb) = (self.p2v[a], self.p2v[b]);
        self.p2v.swap(a, b);
        self.v2p[va] = b;
        self.v2p[vb] = a;
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.permute(a, b);
        self.out.push(Instruction::gate(GateKind::SWAP, &[a, b]));
        self.swaps += 1;
    }

    fn emit(&mut self, inst: &Instruction) {
        self.out.push(inst.remapped(|v| self.v2p[v]));
    }

    /// Move `p` along `path` (starting at `p`), stopping `keep` nodes short of the end.
    fn walk(&mut self, path: &[usize], keep: usize) -> Vec<(usize, usize)> {
        let mut done = Vec::new();
        for w in path.windows(2).take(path.len().saturating_sub(1 + keep)) {
            self.swap(w[0], w[1]);
            done.push((w[0], w[1]));
        }
        done
    }

    /// Insert SWAPs along shortest paths until `inst` is executable.
    fn make_executable(&mut self, inst: &Instruction) -> Result<Vec<(usize, usize)>, PassError> {
        let ps = self.phys(&inst.qubits);
        match ps.len() {
            2 => {
                let path = self.d.shortest_path(ps[0], ps[1]);
                Ok(self.walk(&path, 1))
            }
            3 => {
                let center = (0..3).min_by_key(|&c| center_cost(self.d, &ps, c)).unwrap();
                let others: Vec<usize> = (0..3).filter(|&i| i != center).map(|i| inst.qubits[i]).collect();
                let vc = inst.qubits[center];
                let path = self.d.shortest_path(self.v2p[others[0]], self.v2p[vc]);
                let mut done = self.walk(&path, 1);
                let (pc, px, py) = (self.v2p[vc], self.v2p[others[0]], self.v2p[others[1]]);
                if self.d.is_coupled(py, pc) || self.d.is_coupled(py, px) {
                    return Ok(done);
                }
                let path = self.path_to_triple(py, pc, px).ok_or_else(|| PassError::Unroutable {
                    kind: inst.kind,
                    qubits: vec![px, pc, py],
                })?;
                done.extend(self.walk(&path, 0));
                Ok(done)
            }
            _ => Ok(Vec::new()),
        }
    }

    /// Shortest path from `from` to any node adjacent to `pc` or `px`, never
    /// stepping on either.
    fn path_to_triple(&self, from: usize, pc: usize, px: usize) -> Option<Vec<usize>> {
        let n = self.d.num_qubits;
        let goal = |q: usize| q != pc && q != px && (self.d.is_coupled(q, pc) || self.d.is_coupled(q, px));
        let mut parent = vec![usize::MAX; n];
        parent[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if goal(u) {
                let mut path = vec![u];
                let mut cur = u;
                while cur != from {
                    cur = parent[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some(path);
            }
            for &v in self.d.neighbors(u) {
                if parent[v] == usize::MAX && v != pc && v != px {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

/// Dependency structure of the non-measurement instructions.
struct Dag {
    gates: Vec<Instruction>,
    succ: Vec<Vec<usize>>,
    indeg: Vec<usize>,
    measures: Vec<Instruction>,
}

impl Dag {
    fn new(c: &Circuit) -> Self {
        let (measures, gates): (Vec<_>, Vec<_>) =
            c.instructions.iter().cloned().partition(|i| i.kind == GateKind::Measure);
        let mut last: Vec<Option<usize>> = vec![None; c.num_qubits];
        let mut succ = vec![Vec::new(); gates.len()];
        let mut indeg = vec![0; gates.len()];
        for (i, g) in gates.iter().enumerate() {
            let mut preds: Vec<usize> = g.qubits.iter().filter_map(|&q| last[q]).collect();
            preds.sort_unstable();
            preds.dedup();
            for p in preds {
                succ[p].push(i);
                indeg[i] += 1;
            }
            for &q in &g.qubits {
                last[q] = Some(i);
            }
        }
        Dag {
            gates,
            succ,
            indeg,
            measures,
        }
    }
}

/// Front-layer bookkeeping shared by the layer-based routers.
struct Frontier {
    indeg: Vec<usize>,
    front: Vec<usize>,
    done: Vec<bool>,
    /// Lowest index not yet executed.
    cursor: usize,
}

impl Frontier {
    fn new(dag: &Dag) -> Self {
        let front = (0..dag.gates.len()).filter(|&i| dag.indeg[i] == 0).collect();
        Frontier {
            indeg: dag.indeg.clone(),
            front,
            done: vec![false; dag.gates.len()],
            cursor: 0,
        }
    }

    /// Emit every executable gate reachable from the front. Returns whether any ran.
    fn drain(&mut self, dag: &Dag, st: &mut State) -> bool {
        let mut any = false;
        loop {
            let ready: Vec<usize> = self
                .front
                .iter()
                .copied()
                .filter(|&g| st.gate_cost(&dag.gates[g]) == 0)
                .collect();
            if ready.is_empty() {
                break;
            }
            any = true;
            self.front.retain(|g| !ready.contains(g));
            for g in ready {
                st.emit(&dag.gates[g]);
                self.done[g] = true;
                for &s in &dag.succ[g] {
                    self.indeg[s] -= 1;
                    if self.indeg[s] == 0 {
                        self.front.push(s);
                    }
                }
            }
            self.front.sort_unstable();
        }
        while self.cursor < self.done.len() && self.done[self.cursor] {
            self.cursor += 1;
        }
        any
    }

    fn front_cost(&self, dag: &Dag, st: &State) -> u32 {
        self.front.iter().map(|&g| st.gate_cost(&dag.gates[g])).sum()
    }

    /// The next `limit` multi-qubit gates after the front, in program order.
    fn extended(&self, dag: &Dag, limit: usize) -> Vec<usize> {
        (self.cursor..dag.gates.len())
            .filter(|&g| !self.done[g] && !self.front.contains(&g) && dag.gates[g].kind.is_multi_qubit_gate())
            .take(limit)
            .collect()
    }

    /// Coupling edges touching a physical qubit that hosts a front-gate operand.
    fn candidate_edges(&self, dag: &Dag, st: &State) -> Vec<(usize, usize)> {
        let mut hot = vec![false; st.d.num_qubits];
        for &g in &self.front {
            for &v in &dag.gates[g].qubits {
                hot[st.v2p[v]] = true;
            }
        }
        st.d.edges.iter().copied().filter(|&(a, b)| hot[a] || hot[b]).collect()
    }
}

fn finish(c: &Circuit, dag: &Dag, st: State, initial: &[usize]) -> Routed {
    let State { v2p, mut out, swaps, .. } = st;
    for m in &dag.measures {
        out.push(m.remapped(|v| v2p[v]));
    }
    let n = c.num_qubits;
    let mut circuit = Circuit::new(v2p.len(), c.num_clbits);
    circuit.instructions = out;
    circuit.layout = Some(initial[..n].to_vec());
    circuit.final_layout = Some(v2p[..n].to_vec());
    Routed {
        circuit,
        swaps,
        final_v2p: v2p,
    }
}

fn check_start(c: &Circuit, d: &DeviceModel, start: &[usize]) -> Result<(), PassError> {
    if c.num_qubits > d.num_qubits {
        return Err(PassError::CircuitTooLarge {
            needed: c.num_qubits,
            available: d.num_qubits,
        });
    }
    Layout::new(start.to_vec(), d.num_qubits)?;
    if start.len() != d.num_qubits {
        return Err(PassError::InvalidLayout("routing needs a full permutation".into()));
    }
    Ok(())
}

/// Route starting from a full virtual → physical permutation.
pub(super) fn route_from(
    c: &Circuit,
    start: Vec<usize>,
    d: &DeviceModel,
    method: RouteMethod,
    seed: u64,
) -> Result<Routed, PassError> {
    check_start(c, d, &start)?;
    let dag = Dag::new(c);
    let mut st = State::new(d, start.clone());
    match method {
        RouteMethod::Basic => {
            for g in &dag.gates {
                if st.gate_cost(g) == 0 {
                    st.emit(g);
                    continue;
                }
                let swaps = st.make_executable(g)?;
                st.emit(g);
                for &(a, b) in swaps.iter().rev() {
                    st.swap(a, b);
                }
            }
        }
        RouteMethod::Sabre(cfg) => heuristic(&dag, &mut st, cfg, true, &mut rng::rng(seed))?,
        RouteMethod::Lookahead(depth) => {
            let cfg = SabreConfig {
                lookahead: depth,
                lookahead_weight: 1.0,
                decay: 1.0,
                ..SabreConfig::default()
            };
            heuristic(&dag, &mut st, cfg, false, &mut rng::rng(seed))?
        }
    }
    Ok(finish(c, &dag, st, &start))
}

/// Front-layer search: score each candidate SWAP by the routing cost of the
/// front layer plus a weighted lookahead term, scaled by a per-qubit decay.
fn heuristic(dag: &Dag, st: &mut State, cfg: SabreConfig, random_ties: bool, rng: &mut ChaCha8Rng) -> Result<(), PassError> {
    let mut fr = Frontier::new(dag);
    let n = st.d.num_qubits;
    let mut decay = vec![1.0f64; n];
    let mut best_front = u32::MAX;
    let mut stalled = 0;
    loop {
        if fr.drain(dag, st) {
            decay.iter_mut().for_each(|x| *x = 1.0);
            best_front = u32::MAX;
            stalled = 0;
        }
        if fr.front.is_empty() {
            return Ok(());
        }
        let ext = fr.extended(dag, cfg.lookahead);
        let mut best: Vec<(usize, usize)> = Vec::new();
        let mut best_score = f64::INFINITY;
        for (a, b) in fr.candidate_edges(dag, st) {
            st.permute(a, b);
            let f = fr.front_cost(dag, st) as f64;
            let e: f64 = ext.iter().map(|&g| st.gate_cost(&dag.gates[g]) as f64).sum();
            st.permute(a, b);
            let score = decay[a].max(decay[b]) * (f + cfg.lookahead_weight * e);
            if score < best_score - 1e-9 {
                best_score = score;
                best.clear();
                best.push((a, b));
            } else if (score - best_score).abs() <= 1e-9 {
                best.push((a, b));
            }
        }
        let (a, b) = if random_ties && best.len() > 1 {
            best[rng.gen_range(0..best.len())]
        } else {
            best[0]
        };
        st.swap(a, b);
        decay[a] /= cfg.decay;
        decay[b] /= cfg.decay;
        let now = fr.front_cost(dag, st);
        if now < best_front {
            best_front = now;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if stalled >= cfg.reset_after {
            decay.iter_mut().for_each(|x| *x = 1.0);
            let first = fr.front[0];
            st.make_executable(&dag.gates[first])?;
            best_front = u32::MAX;
            stalled = 0;
        }
    }
}

fn stochastic_trial(dag: &Dag, st: &mut State, rng: &mut ChaCha8Rng) -> Result<bool, PassError> {
    let mut fr = Frontier::new(dag);
    let layer_cap = 8 * st.d.num_qubits + 8;
    loop {
        fr.drain(dag, st);
        if fr.front.is_empty() {
            return Ok(true);
        }
        let mut layers = 0;
        while fr.front_cost(dag, st) > 0 {
            layers += 1;
            if layers > layer_cap {
                return Ok(false);
            }
            let mut edges = fr.candidate_edges(dag, st);
            edges.shuffle(rng);
            let mut busy = vec![false; st.d.num_qubits];
            let mut current = fr.front_cost(dag, st);
            let mut applied = 0;
            for (a, b) in edges {
                if busy[a] || busy[b] {
                    continue;
                }
                st.permute(a, b);
                let next = fr.front_cost(dag, st);
                st.permute(a, b);
                if next < current {
                    st.swap(a, b);
                    busy[a] = true;
                    busy[b] = true;
                    current = next;
                    applied += 1;
                }
            }
            if applied == 0 {
                let first = *fr
                    .front
                    .iter()
                    .find(|&&g| st.gate_cost(&dag.gates[g]) > 0)
                    .expect("front has a blocked gate");
                st.make_executable(&dag.gates[first])?;
                break;
            }
        }
    }
}

fn full_start(c: &Circuit, l: &Layout, d: &DeviceModel) -> Result<Vec<usize>, PassError> {
    if l.len() != c.num_qubits {
        return Err(PassError::InvalidLayout(format!(
            "layout covers {} qubits, circuit has {}",
            l.len(),
            c.num_qubits
        )));
    }
    Ok(l.full_permutation(d.num_qubits))
}

/// Shortest-path SWAPs before each distant gate, undone right after it.
pub fn route_basic(c: &Circuit, l: &Layout, d: &DeviceModel) -> Result<Routed, PassError> {
    route_from(c, full_start(c, l, d)?, d, RouteMethod::Basic, 0)
}

/// Random improving SWAP layers per front layer; the best of `max_trials`
/// whole-circuit trials (fewest SWAPs, earliest on ties) is kept.
pub fn route_stochastic(
    c: &Circuit,
    l: &Layout,
    d: &DeviceModel,
    seed: u64,
    max_trials: usize,
) -> Result<Routed, PassError> {
    let start = full_start(c, l, d)?;
    check_start(c, d, &start)?;
    let dag = Dag::new(c);
    let mut best: Option<Routed> = None;
    for trial in 0..max_trials as u64 {
        let mut st = State::new(d, start.clone());
        let mut rng = rng::rng(rng::derive(seed, STREAM_STOCHASTIC, trial));
        if !stochastic_trial(&dag, &mut st, &mut rng)? {
            continue;
        }
        if best.as_ref().is_none_or(|b| st.swaps < b.swaps) {
            best = Some(finish(c, &dag, st, &start));
        }
        if best.as_ref().is_some_and(|b| b.swaps == 0) {
            break;
        }
    }
    best.ok_or(PassError::TrialBudgetExhausted(max_trials))
}

/// SABRE SWAP search with seeded tie-breaking.
pub fn route_sabre(c: &Circuit, l: &Layout, d: &DeviceModel, seed: u64, cfg: &SabreConfig) -> Result<Routed, PassError> {
    route_from(c, full_start(c, l, d)?, d, RouteMethod::Sabre(*cfg), seed)
}

/// Greedy lookahead SWAP search without decay or randomness.
pub fn route_lookahead(c: &Circuit, l: &Layout, d: &DeviceModel, depth: usize) -> Result<Routed, PassError> {
    route_from(c, full_start(c, l, d)?, d, RouteMethod::Lookahead(depth), 0)
}

const STREAM_STOCHASTIC: u64 = 0x7374_6f63;
