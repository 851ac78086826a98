use std::collections::BTreeMap;

/// Render a classical-register value as a fixed-width MSB-first bitstring.
pub fn bitstring(value: u64, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if value >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parse an MSB-first bitstring back to a register value.
pub fn parse_bitstring(s: &str) -> Option<u64> {
    if s.is_empty() || s.len() > 64 {
        return if s.is_empty() { Some(0) } else { None };
    }
    let mut v = 0u64;
    for ch in s.chars() {
        v = (v << 1)
            | match ch {
                '0' => 0,
                '1' => 1,
                _ => return None,
            };
    }
    Some(v)
}

/// Probability distribution over classical-register outcomes.
///
/// Keys are register values with clbit `i` in bit `i`; they print MSB-first.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    pub width: usize,
    pub probs: BTreeMap<u64, f64>,
}

/// Threshold above which an outcome counts as part of the support.
pub const PEAK_THRESHOLD: f64 = 1e-6;

impl Distribution {
    pub fn new(width: usize) -> Self {
        Distribution {
            width,
            probs: BTreeMap::new(),
        }
    }

    pub fn point(width: usize, value: u64) -> Self {
        let mut d = Self::new(width);
        d.probs.insert(value, 1.0);
        d
    }

    /// Build from `(outcome, probability)` pairs, dropping exact zeros.
    pub fn from_pairs(width: usize, pairs: impl IntoIterator<Item = (u64, f64)>) -> Self {
        let mut d = Self::new(width);
        for (k, p) in pairs {
            if p > 0.0 {
                *d.probs.entry(k).or_insert(0.0) += p;
            }
        }
        d
    }

    pub fn prob(&self, outcome: u64) -> f64 {
        self.probs.get(&outcome).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Outcomes whose probability reaches [`PEAK_THRESHOLD`].
    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.probs
            .iter()
            .filter(|(_, &p)| p >= PEAK_THRESHOLD)
            .map(|(&k, _)| k)
    }

    pub fn contains(&self, outcome: u64) -> bool {
        self.prob(outcome) >= PEAK_THRESHOLD
    }

    /// Largest absolute probability difference over the union of outcomes.
    pub fn max_deviation(&self, other: &Distribution) -> f64 {
        self.probs
            .keys()
            .chain(other.probs.keys())
            .map(|&k| (self.prob(k) - other.prob(k)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_string_map(&self) -> BTreeMap<String, f64> {
        self.probs
            .iter()
            .map(|(&k, &p)| (bitstring(k, self.width), p))
            .collect()
    }
}

/// Shot counts over classical-register outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub width: usize,
    pub counts: BTreeMap<u64, u64>,
}

impl Counts {
    pub fn new(width: usize) -> Self {
        Counts {
            width,
            counts: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, outcome: u64) {
        *self.counts.entry(outcome).or_insert(0) += 1;
    }

    pub fn shots(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, outcome: u64) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    /// Associative merge of two count maps over the same register.
    pub fn merge(&mut self, other: &Counts) {
        for (&k, &v) in &other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
    }

    pub fn from_strings<'a>(width: usize, pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Option<Self> {
        let mut c = Self::new(width);
        for (s, n) in pairs {
            if s.len() != width {
                return None;
            }
            *c.counts.entry(parse_bitstring(s)?).or_insert(0) += n;
        }
        Some(c)
    }

    pub fn to_string_map(&self) -> BTreeMap<String, u64> {
        self.counts
            .iter()
            .map(|(&k, &v)| (bitstring(k, self.width), v))
            .collect()
    }
}
