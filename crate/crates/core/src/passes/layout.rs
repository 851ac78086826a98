use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::ir::{Circuit, DeviceModel};
use crate::rng;

use super::routing::{route_from, RouteMethod};
use super::{PassError, SabreConfig};

/// Injective virtual → physical qubit map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    v2p: Vec<usize>,
}

impl Layout {
    pub fn new(v2p: Vec<usize>, num_physical: usize) -> Result<Self, PassError> {
        let mut used = vec![false; num_physical];
        for &p in &v2p {
            if p >= num_physical {
                return Err(PassError::InvalidLayout(format!("physical qubit {p} outside device")));
            }
            if std::mem::replace(&mut used[p], true) {
                return Err(PassError::InvalidLayout(format!("physical qubit {p} assigned twice")));
            }
        }
        Ok(Layout { v2p })
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.v2p
    }

    pub fn len(&self) -> usize {
        self.v2p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v2p.is_empty()
    }

    pub fn physical(&self, v: usize) -> usize {
        self.v2p[v]
    }

    /// Extend to a permutation of all physical qubits; unused physical
    /// qubits become ancillas in ascending order.
    pub fn full_permutation(&self, num_physical: usize) -> Vec<usize> {
        let mut used = vec![false; num_physical];
        for &p in &self.v2p {
            used[p] = true;
        }
        let mut full = self.v2p.clone();
        full.extend((0..num_physical).filter(|&p| !used[p]));
        full
    }
}

fn check_fits(c: &Circuit, d: &DeviceModel) -> Result<(), PassError> {
    if c.num_qubits > d.num_qubits {
        return Err(PassError::CircuitTooLarge {
            needed: c.num_qubits,
            available: d.num_qubits,
        });
    }
    Ok(())
}

/// Per-qubit count of multi-qubit gate incidences.
fn interaction_degree(c: &Circuit) -> Vec<usize> {
    let mut deg = vec![0; c.num_qubits];
    for inst in c.instructions.iter().filter(|i| i.kind.is_multi_qubit_gate()) {
        for &q in &inst.qubits {
            deg[q] += 1;
        }
    }
    deg
}

/// Interaction counts of virtual qubit pairs; a three-qubit gate counts for all three pairs.
fn interaction_pairs(c: &Circuit) -> BTreeMap<(usize, usize), usize> {
    let mut pairs = BTreeMap::new();
    for inst in c.instructions.iter().filter(|i| i.kind.is_multi_qubit_gate()) {
        for (i, &a) in inst.qubits.iter().enumerate() {
            for &b in &inst.qubits[i + 1..] {
                *pairs.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
    }
    pairs
}

/// Virtual qubit `i` on physical qubit `i`.
pub fn map_trivial(c: &Circuit, d: &DeviceModel) -> Result<Layout, PassError> {
    check_fits(c, d)?;
    Layout::new((0..c.num_qubits).collect(), d.num_qubits)
}

/// Greedy densest connected subgraph of the circuit's size.
pub fn map_dense(c: &Circuit, d: &DeviceModel) -> Result<Layout, PassError> {
    check_fits(c, d)?;
    let k = c.num_qubits;
    if k == 0 {
        return Layout::new(Vec::new(), d.num_qubits);
    }
    let mut inside = vec![false; d.num_qubits];
    let mut internal = vec![0usize; d.num_qubits];
    let seed = (0..d.num_qubits).max_by_key(|&q| (d.degree(q), std::cmp::Reverse(q))).unwrap();
    let mut nodes = vec![seed];
    inside[seed] = true;
    while nodes.len() < k {
        let next = (0..d.num_qubits)
            .filter(|&q| !inside[q] && d.neighbors(q).iter().any(|&n| inside[n]))
            .max_by_key(|&q| (d.neighbors(q).iter().filter(|&&n| inside[n]).count(), std::cmp::Reverse(q)))
            .expect("coupling graph is connected");
        inside[next] = true;
        nodes.push(next);
    }
    for &q in &nodes {
        internal[q] = d.neighbors(q).iter().filter(|&&n| inside[n]).count();
    }
    nodes.sort_by_key(|&q| (std::cmp::Reverse(internal[q]), q));
    let deg = interaction_degree(c);
    let mut virtuals: Vec<usize> = (0..k).collect();
    virtuals.sort_by_key(|&v| (std::cmp::Reverse(deg[v]), v));
    let mut v2p = vec![0; k];
    for (&v, &p) in virtuals.iter().zip(&nodes) {
        v2p[v] = p;
    }
    Layout::new(v2p, d.num_qubits)
}

/// Greedy placement on the most reliable edges and readout qubits.
pub fn map_noise_adaptive(c: &Circuit, d: &DeviceModel) -> Result<Layout, PassError> {
    check_fits(c, d)?;
    let n = c.num_qubits;
    let mut pairs: Vec<((usize, usize), usize)> = interaction_pairs(c).into_iter().collect();
    pairs.sort_by_key(|&(p, count)| (std::cmp::Reverse(count), p));
    let mut v2p: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; d.num_qubits];
    let err = |a: usize, b: usize| d.edge_error(a, b).unwrap_or(1.0);
    let by_error = |x: &(f64, usize, usize), y: &(f64, usize, usize)| x.partial_cmp(y).unwrap();
    let mut progress = true;
    while progress {
        progress = false;
        for &((a, b), _) in &pairs {
            match (v2p[a], v2p[b]) {
                (Some(_), Some(_)) => {}
                (Some(pa), None) | (None, Some(pa)) => {
                    let free = if v2p[a].is_none() { a } else { b };
                    let best = d
                        .neighbors(pa)
                        .iter()
                        .filter(|&&q| !used[q])
                        .map(|&q| (err(pa, q), q, q))
                        .min_by(by_error);
                    if let Some((_, q, _)) = best {
                        v2p[free] = Some(q);
                        used[q] = true;
                        progress = true;
                    }
                }
                (None, None) => {
                    let near_placed = |q: usize| d.neighbors(q).iter().any(|&m| used[m]);
                    let free_edges = d.edges.iter().filter(|&&(x, y)| !used[x] && !used[y]);
                    let adjacent: Vec<_> = free_edges.clone().filter(|&&(x, y)| near_placed(x) || near_placed(y)).collect();
                    let pool: Vec<_> = if adjacent.is_empty() { free_edges.collect() } else { adjacent };
                    if let Some((_, x, y)) = pool.iter().map(|&&(x, y)| (err(x, y), x, y)).min_by(by_error) {
                        v2p[a] = Some(x);
                        v2p[b] = Some(y);
                        used[x] = true;
                        used[y] = true;
                        progress = true;
                    }
                }
            }
        }
    }
    let mut by_readout: Vec<usize> = (0..d.num_qubits).filter(|&q| !used[q]).collect();
    by_readout.sort_by(|&x, &y| d.readout_error[x].partial_cmp(&d.readout_error[y]).unwrap().then(x.cmp(&y)));
    let mut free = by_readout.into_iter();
    let v2p = v2p
        .into_iter()
        .map(|p| p.unwrap_or_else(|| free.next().expect("device has room")))
        .collect();
    Layout::new(v2p, d.num_qubits)
}

/// Layout search by alternating forward and reverse SABRE routing from a
/// seeded random start. Returns the candidate with the fewest forward SWAPs.
pub fn map_sabre(c: &Circuit, d: &DeviceModel, seed: u64, cfg: &SabreConfig) -> Result<Layout, PassError> {
    check_fits(c, d)?;
    let n = c.num_qubits;
    let mut start: Vec<usize> = (0..d.num_qubits).collect();
    start.shuffle(&mut rng::rng(rng::derive(seed, STREAM_LAYOUT, 0)));
    let reversed = c.reversed_gates();
    let method = RouteMethod::Sabre(*cfg);
    let mut candidates = vec![start.clone()];
    let mut current = start;
    for it in 0..cfg.layout_iterations as u64 {
        let fwd = route_from(c, current, d, method, rng::derive(seed, STREAM_LAYOUT, 2 * it + 1))?;
        let back = route_from(&reversed, fwd.final_v2p, d, method, rng::derive(seed, STREAM_LAYOUT, 2 * it + 2))?;
        current = back.final_v2p;
        candidates.push(current.clone());
    }
    let mut best: Option<(usize, Vec<usize>)> = None;
    for cand in candidates {
        let swaps = route_from(c, cand.clone(), d, method, rng::derive(seed, STREAM_LAYOUT, u64::MAX))?.swaps;
        if best.as_ref().is_none_or(|(s, _)| swaps < *s) {
            best = Some((swaps, cand));
        }
    }
    let (_, full) = best.expect("at least one candidate");
    Layout::new(full[..n].to_vec(), d.num_qubits)
}

const STREAM_LAYOUT: u64 = 0x6c61_796f;

#[cfg(test)]
mod tests {
    use super::*;

    fn t_device() -> DeviceModel {
        DeviceModel::uniform(4, &[(0, 1), (1, 2), (1, 3)], 0.01, 0.02).unwrap()
    }

    fn ring_circuit(n: usize) -> Circuit {
        let mut c = Circuit::new(n, n);
        for q in 0..n {
            c.cx(q, (q + 1) % n);
        }
        c.measure_all();
        c
    }

    #[test]
    fn trivial_identity_and_size_check() {
        let d = DeviceModel::line(27, 0.01, 0.02).unwrap();
        assert_eq!(map_trivial(&Circuit::new(3, 0), &d).unwrap().as_slice(), &[0, 1, 2]);
        assert_eq!(map_trivial(&Circuit::new(1, 0), &d).unwrap().as_slice(), &[0]);
        assert_eq!(
            map_trivial(&Circuit::new(28, 0), &d),
            Err(PassError::CircuitTooLarge { needed: 28, available: 27 })
        );
    }

    #[test]
    fn dense_on_t_shape() {
        let mut c = Circuit::new(3, 0);
        c.cx(0, 1).cx(1, 2);
        let l = map_dense(&c, &t_device()).unwrap();
        let mut image = l.as_slice().to_vec();
        image.sort();
        assert!(image.contains(&1));
        // virtual 1 has the most interactions and sits on the hub
        assert_eq!(l.physical(1), 1);
    }

    #[test]
    fn dense_whole_device_and_line_tie() {
        let d = t_device();
        let mut image = map_dense(&Circuit::new(4, 0), &d).unwrap().as_slice().to_vec();
        image.sort();
        assert_eq!(image, vec![0, 1, 2, 3]);
        let line = DeviceModel::line(2, 0.01, 0.01).unwrap();
        let mut image = map_dense(&Circuit::new(2, 0), &line).unwrap().as_slice().to_vec();
        image.sort();
        assert_eq!(image, vec![0, 1]);
    }

    #[test]
    fn noise_adaptive_picks_best_edge() {
        let mut d = DeviceModel::line(3, 0.01, 0.02).unwrap();
        d.cx_error.insert((0, 1), 0.05);
        let mut c = Circuit::new(2, 2);
        c.cx(0, 1).measure_all();
        let l = map_noise_adaptive(&c, &d).unwrap();
        let mut image = l.as_slice().to_vec();
        image.sort();
        assert_eq!(image, vec![1, 2]);
    }

    #[test]
    fn noise_adaptive_without_interactions_uses_readout() {
        let mut d = DeviceModel::line(5, 0.01, 0.02).unwrap();
        d.readout_error = vec![0.05, 0.01, 0.04, 0.02, 0.03];
        let mut c = Circuit::new(3, 3);
        c.x(0).x(1).x(2).measure_all();
        let l = map_noise_adaptive(&c, &d).unwrap();
        assert_eq!(l.as_slice(), &[1, 3, 4]);
    }

    #[test]
    fn sabre_layout_deterministic_and_finds_ring() {
        let ring = DeviceModel::uniform(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)], 0.01, 0.01).unwrap();
        let c = ring_circuit(6);
        let cfg = SabreConfig::default();
        let a = map_sabre(&c, &ring, 3, &cfg).unwrap();
        assert_eq!(a, map_sabre(&c, &ring, 3, &cfg).unwrap());
        let routed = route_from(&c, a.full_permutation(6), &ring, RouteMethod::Sabre(cfg), 0).unwrap();
        assert_eq!(routed.swaps, 0);
    }

    #[test]
    fn full_permutation_appends_free_qubits() {
        let l = Layout::new(vec![3, 1], 5).unwrap();
        assert_eq!(l.full_permutation(5), vec![3, 1, 0, 2, 4]);
        assert!(Layout::new(vec![1, 1], 3).is_err());
        assert!(Layout::new(vec![5], 3).is_err());
    }
}
