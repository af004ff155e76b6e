//! Node selection strategies.
//!
//! Each strategy implements [`SelectionStrategy`] and is registered under a name
//! in a [`StrategyRegistry`]; the runner instantiates one per episode from the
//! `strategy` config key.

mod aoi;
mod random;
mod ucb;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use aoi::{f_value, score_node_aoi, select_aoi, select_aoi_marginal, AoiStrategy, AoiWeights};
pub use random::{select_random, RandomStrategy};
pub use ucb::{report_reward, select_ucb, ucb_observe, UcbArms, UcbStrategy};

use crate::error::{Error, Result};
use crate::fusion_center::FcKnowledge;
use crate::params::SimParams;
use crate::radar_node::NodeReport;
use crate::rng::SimRng;
use crate::{NodeId, TargetId};

/// Everything a strategy may look at in one update period.
#[derive(Clone, Copy, Debug)]
pub struct SelectionInput<'a> {
    pub period: u64,
    pub node_count: usize,
    pub capacity: usize,
    pub available: &'a BTreeSet<NodeId>,
    /// Active fusion-center tracks and their ages.
    pub ages: &'a BTreeMap<TargetId, u32>,
    pub knowledge: &'a FcKnowledge,
}

pub trait SelectionStrategy: Send {
    fn name(&self) -> &'static str;

    /// Picks exactly `input.capacity` distinct nodes.
    fn select(&mut self, input: &SelectionInput<'_>, rng: &mut SimRng) -> Result<BTreeSet<NodeId>>;

    /// Feedback from one selected node's report.
    fn observe(&mut self, _report: &NodeReport) {}
}

impl fmt::Debug for dyn SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SelectionStrategy({})", self.name())
    }
}

pub type StrategyFactory = fn(&SimParams) -> Box<dyn SelectionStrategy>;

#[derive(Clone, Default)]
pub struct StrategyRegistry {
    factories: BTreeMap<&'static str, StrategyFactory>,
}

impl StrategyRegistry {
    pub fn new() -> Self {
        StrategyRegistry::default()
    }

    /// `aoi`, `ucb` and `random`.
    pub fn builtin() -> Self {
        let mut reg = StrategyRegistry::new();
        reg.register(AoiStrategy::NAME, |p| Box::new(AoiStrategy::from_params(p)));
        reg.register(UcbStrategy::NAME, |p| Box::new(UcbStrategy::new(p.nodes)));
        reg.register(RandomStrategy::NAME, |_| Box::new(RandomStrategy));
        reg
    }

    pub fn register(&mut self, name: &'static str, factory: StrategyFactory) {
        self.factories.insert(name, factory);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn create(&self, name: &str, params: &SimParams) -> Result<Box<dyn SelectionStrategy>> {
        self.factories
            .get(name)
            .map(|f| f(params))
            .ok_or_else(|| Error::UnknownStrategy(name.to_string()))
    }
}

/// Sorts `(node, score)` by descending score, ties by ascending id, and keeps `n`.
pub(crate) fn top_n(mut scored: Vec<(NodeId, f64)>, n: usize) -> Vec<NodeId> {
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.into_iter().take(n).map(|(k, _)| k).collect()
}
