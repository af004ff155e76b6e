//! Single-node track trace.

use nalgebra::Vector2;

use super::episode::Episode;
use crate::error::{Error, Result};
use crate::params::SimParams;
use crate::selection::SelectionStrategy;
use crate::{NodeId, TargetId};

#[derive(Clone, Debug, PartialEq)]
pub struct TraceRow {
    pub cpi: u64,
    pub target_id: TargetId,
    pub true_position: Vector2<f64>,
    pub estimate: Vector2<f64>,
    pub flag: bool,
}

/// Follows one of `node`'s tracks per CPI: the lowest-id track is picked and
/// kept until the node drops it, then the next one is picked.
pub fn trace_node(
    params: &SimParams,
    strategy: Box<dyn SelectionStrategy>,
    seed: u64,
    cpis: u64,
    node: NodeId,
) -> Result<Vec<TraceRow>> {
    if node.0 == 0 || node.0 as usize > params.nodes {
        return Err(Error::config("node", format!("must be in 1..={}", params.nodes)));
    }
    let mut episode = Episode::new(params.clone(), strategy, seed);
    let mut followed: Option<TargetId> = None;
    let mut rows = Vec::new();
    for _ in 0..cpis {
        episode.step()?;
        let radar = episode.node(node);
        if followed.is_none_or(|t| radar.track(t).is_none()) {
            followed = radar.tracks().keys().next().copied();
        }
        let Some(target) = followed else { continue };
        let (Some(track), Some(truth)) = (radar.track(target), episode.world().active_target(target))
        else {
            continue;
        };
        rows.push(TraceRow {
            cpi: episode.world().cpi,
            target_id: target,
            true_position: truth.position,
            estimate: track.position(),
            flag: radar.flag(),
        });
    }
    Ok(rows)
}
