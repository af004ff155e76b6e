//! Discrete-time simulator for communication-limited cognitive radar networks.
//!
//! A fusion center polls `M` radar nodes once per update period and may collect
//! reports from only `C` of them. Nodes run per-target Kalman filters and raise an
//! "interesting update" flag on large innovations or track lifecycle events. The
//! fusion center picks its reporting nodes through a [`selection::SelectionStrategy`]
//! looked up by name in a [`selection::StrategyRegistry`], fuses the reports and
//! keeps an age counter for every track it holds.
//!
//! The [`runner`] module drives whole episodes and Monte Carlo batches and writes
//! the CSV/JSON outputs consumed by plotting tools.

pub mod environment;
pub mod error;
pub mod fusion_center;
pub mod kalman;
pub mod metrics;
pub mod params;
pub mod radar_node;
pub mod rng;
pub mod runner;
pub mod selection;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use error::{Error, Result};
pub use params::{Region, SimParams};

/// Radar node identifier, `1..=M`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

/// Target identifier. Assigned monotonically by the environment and never reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TargetId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TargetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// All node ids of an `m`-node network in ascending order.
pub fn node_ids(m: usize) -> impl Iterator<Item = NodeId> {
    (1..=m as u32).map(NodeId)
}
