//! Multi-select UCB1 with availability forcing.

use std::collections::BTreeSet;

use super::{top_n, SelectionInput, SelectionStrategy};
use crate::error::Result;
use crate::radar_node::{NodeReport, ReportStatus};
use crate::rng::SimRng;
use crate::{node_ids, NodeId};

/// Pull counts and running mean rewards, one arm per node.
#[derive(Clone, Debug, PartialEq)]
pub struct UcbArms {
    counts: Vec<u64>,
    means: Vec<f64>,
    rounds: u64,
}

impl UcbArms {
    pub fn new(nodes: usize) -> Self {
        UcbArms {
            counts: vec![0; nodes],
            means: vec![0.0; nodes],
            rounds: 0,
        }
    }

    pub fn count(&self, node: NodeId) -> u64 {
        self.counts[node.0 as usize - 1]
    }

    pub fn mean(&self, node: NodeId) -> f64 {
        self.means[node.0 as usize - 1]
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// `mean + sqrt(2 ln t / n)`; unpulled arms are infinite.
    pub fn index(&self, node: NodeId, t: u64) -> f64 {
        let n = self.count(node);
        if n == 0 {
            return f64::INFINITY;
        }
        self.mean(node) + (2.0 * (t as f64).ln() / n as f64).sqrt()
    }

    pub fn record(&mut self, node: NodeId, reward: f64) {
        let i = node.0 as usize - 1;
        self.counts[i] += 1;
        self.means[i] += (reward - self.means[i]) / self.counts[i] as f64;
    }
}

/// Mean of `1 / (1 + sigma)` over the fusion center's `tracked` active tracks,
/// where a track the node did not report contributes 0. Reports listing more
/// live tracks than `tracked` are averaged over their own entries. 0 when empty.
pub fn report_reward(report: &NodeReport, tracked: usize) -> f64 {
    let mut sum = 0.0;
    let mut n = 0usize;
    for e in &report.entries {
        if e.status != ReportStatus::Retired {
            sum += 1.0 / (1.0 + e.variance);
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n.max(tracked) as f64
    }
}

pub fn ucb_observe(arms: &mut UcbArms, node: NodeId, report: &NodeReport, tracked: usize) {
    arms.record(node, report_reward(report, tracked));
}

/// One selection round. Available nodes compete on their index when there are
/// at least `C` of them; otherwise all of them are taken and the remaining slots
/// go to the best of the rest.
pub fn select_ucb(arms: &mut UcbArms, input: &SelectionInput<'_>) -> BTreeSet<NodeId> {
    arms.rounds += 1;
    let t = arms.rounds;
    let ranked = |filter: &dyn Fn(NodeId) -> bool, n: usize| {
        let scored = node_ids(input.node_count)
            .filter(|&k| filter(k))
            .map(|k| (k, arms.index(k, t)))
            .collect();
        top_n(scored, n)
    };
    let avail = input.available;
    if avail.len() >= input.capacity {
        ranked(&|k| avail.contains(&k), input.capacity)
            .into_iter()
            .collect()
    } else {
        let mut chosen = avail.clone();
        chosen.extend(ranked(&|k| !avail.contains(&k), input.capacity - avail.len()));
        chosen
    }
}

#[derive(Clone, Debug)]
pub struct UcbStrategy {
    pub arms: UcbArms,
    /// Active fusion-center tracks at the last selection.
    tracked: usize,
}

impl UcbStrategy {
    pub const NAME: &'static str = "ucb";

    pub fn new(nodes: usize) -> Self {
        UcbStrategy {
            arms: UcbArms::new(nodes),
            tracked: 0,
        }
    }
}

impl SelectionStrategy for UcbStrategy {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn select(&mut self, input: &SelectionInput<'_>, _rng: &mut SimRng) -> Result<BTreeSet<NodeId>> {
        self.tracked = input.ages.len();
        Ok(select_ucb(&mut self.arms, input))
    }

    fn observe(&mut self, report: &NodeReport) {
        ucb_observe(&mut self.arms, report.node_id, report, self.tracked);
    }
}
