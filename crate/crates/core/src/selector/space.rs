use serde::{Deserialize, Serialize};

use crate::passes::{Mapper, PassCombination, Router, Scheduler};

use super::SelectorError;

/// One pipeline stage and the options searched for it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", content = "options", rename_all = "snake_case")]
pub enum Stage {
    Mapper(Vec<Mapper>),
    Router(Vec<Router>),
    Scheduler(Vec<Scheduler>),
    Trios(Vec<bool>),
    Dd(Vec<bool>),
}

impl Stage {
    pub fn name(&self) -> &'static str {
        match self {
            Stage::Mapper(_) => "mapper",
            Stage::Router(_) => "router",
            Stage::Scheduler(_) => "scheduler",
            Stage::Trios(_) => "trios",
            Stage::Dd(_) => "dd",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Stage::Mapper(v) => v.len(),
            Stage::Router(v) => v.len(),
            Stage::Scheduler(v) => v.len(),
            Stage::Trios(v) | Stage::Dd(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Write option `i` of this stage into `combo`.
    fn set(&self, combo: &mut PassCombination, i: usize) {
        match self {
            Stage::Mapper(v) => combo.mapper = v[i],
            Stage::Router(v) => combo.router = v[i],
            Stage::Scheduler(v) => combo.scheduler = v[i],
            Stage::Trios(v) => combo.trios = v[i],
            Stage::Dd(v) => combo.dd = v[i],
        }
    }

    /// Index of the option `combo` uses for this stage.
    fn index_of(&self, combo: &PassCombination) -> Option<usize> {
        match self {
            Stage::Mapper(v) => v.iter().position(|&o| o == combo.mapper),
            Stage::Router(v) => v.iter().position(|&o| o == combo.router),
            Stage::Scheduler(v) => v.iter().position(|&o| o == combo.scheduler),
            Stage::Trios(v) => v.iter().position(|&o| o == combo.trios),
            Stage::Dd(v) => v.iter().position(|&o| o == combo.dd),
        }
    }
}

/// Ordered pipeline stages, their chunking for staged search, and the
/// number of survivors carried between chunks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub stages: Vec<Stage>,
    pub chunking: Vec<usize>,
    pub k: usize,
}

impl Default for SearchSpace {
    /// Mapping × routing × scheduling × Trios × DD, chunked as (3, 2).
    fn default() -> Self {
        SearchSpace {
            stages: vec![
                Stage::Mapper(Mapper::SEARCHED.to_vec()),
                Stage::Router(Router::SEARCHED.to_vec()),
                Stage::Scheduler(Scheduler::ALL.to_vec()),
                Stage::Trios(vec![false, true]),
                Stage::Dd(vec![false, true]),
            ],
            chunking: vec![3, 2],
            k: 1,
        }
    }
}

impl SearchSpace {
    /// Mapping, routing and scheduling only.
    pub fn mapping_routing_scheduling() -> Self {
        let mut s = Self::default();
        s.stages.truncate(3);
        s.chunking = vec![3];
        s
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn check(&self) -> Result<(), SelectorError> {
        if self.stages.is_empty() {
            return Err(SelectorError::Space("no stages".into()));
        }
        for (i, s) in self.stages.iter().enumerate() {
            if s.is_empty() {
                return Err(SelectorError::Space(format!("stage `{}` has no options", s.name())));
            }
            if self.stages[..i].iter().any(|t| t.name() == s.name()) {
                return Err(SelectorError::Space(format!("stage `{}` listed twice", s.name())));
            }
        }
        if self.chunking.iter().sum::<usize>() != self.stages.len() || self.chunking.contains(&0) {
            return Err(SelectorError::Space(format!(
                "chunk sizes {:?} do not partition {} stages",
                self.chunking,
                self.stages.len()
            )));
        }
        if self.k == 0 {
            return Err(SelectorError::Space("k must be at least 1".into()));
        }
        Ok(())
    }

    /// Total number of combinations, the product of the option counts.
    pub fn size(&self) -> usize {
        self.stages.iter().map(Stage::len).product()
    }

    /// Stage ranges of each chunk.
    pub fn chunks(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.chunking
            .iter()
            .map(|&m| {
                let r = start..start + m;
                start += m;
                r
            })
            .collect()
    }

    /// The combination with option `choice[i]` at stage `i`; stages outside
    /// the space keep the default combination's setting.
    pub fn combination(&self, choice: &[usize]) -> PassCombination {
        let mut combo = PassCombination::default();
        for (stage, &i) in self.stages.iter().zip(choice) {
            stage.set(&mut combo, i);
        }
        combo
    }

    /// Position of a choice vector in lexicographic enumeration order.
    pub fn index(&self, choice: &[usize]) -> usize {
        self.stages.iter().zip(choice).fold(0, |acc, (s, &i)| acc * s.len() + i)
    }

    pub fn choice(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.stages.len()];
        for (slot, s) in out.iter_mut().zip(&self.stages).rev() {
            *slot = index % s.len();
            index /= s.len();
        }
        out
    }

    /// Position of `combo` in the enumeration, if it belongs to the space.
    pub fn index_of(&self, combo: &PassCombination) -> Option<usize> {
        let choice: Option<Vec<usize>> = self.stages.iter().map(|s| s.index_of(combo)).collect();
        let choice = choice?;
        (self.combination(&choice) == *combo).then(|| self.index(&choice))
    }
}

/// Every combination of the space in lexicographic order of stage options.
pub fn enumerate_combinations(space: &SearchSpace) -> Vec<PassCombination> {
    (0..space.size()).map(|i| space.combination(&space.choice(i))).collect()
}
