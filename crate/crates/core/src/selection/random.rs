use std::collections::BTreeSet;

use rand::seq::index;

use super::{SelectionInput, SelectionStrategy};
use crate::error::Result;
use crate::rng::SimRng;
use crate::NodeId;

/// Uniform `C`-subset of all nodes, blind to availability.
pub fn select_random(input: &SelectionInput<'_>, rng: &mut SimRng) -> BTreeSet<NodeId> {
    index::sample(rng, input.node_count, input.capacity)
        .into_iter()
        .map(|i| NodeId(i as u32 + 1))
        .collect()
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RandomStrategy;

impl RandomStrategy {
    pub const NAME: &'static str = "random";
}

impl SelectionStrategy for RandomStrategy {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn select(&mut self, input: &SelectionInput<'_>, rng: &mut SimRng) -> Result<BTreeSet<NodeId>> {
        Ok(select_random(input, rng))
    }
}
