//! Track-age objective: each selected node earns the age-over-variance of the
//! targets it is known to see, `beta` for targets of unknown visibility and
//! `gamma` for targets it is known not to see, discounted by `alpha` when the
//! node's flag is down.

use std::collections::{BTreeMap, BTreeSet};

use super::{top_n, SelectionInput, SelectionStrategy};
use crate::error::{Error, Result};
use crate::fusion_center::{FcKnowledge, PairKnowledge};
use crate::params::SimParams;
use crate::rng::SimRng;
use crate::{node_ids, NodeId, TargetId};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AoiWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl AoiWeights {
    pub fn from_params(p: &SimParams) -> Self {
        AoiWeights {
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
        }
    }
}

pub fn f_value(
    node: NodeId,
    target: TargetId,
    age: u32,
    knowledge: &FcKnowledge,
    w: &AoiWeights,
) -> Result<f64> {
    match knowledge.pair(node, target) {
        PairKnowledge::Sees(sigma) => {
            if !(sigma > 0.0) {
                return Err(Error::InvalidState { node, target, sigma });
            }
            Ok(f64::from(age) / sigma)
        }
        PairKnowledge::CannotSee => Ok(w.gamma),
        PairKnowledge::Unknown => Ok(w.beta),
    }
}

fn discount(node: NodeId, input: &SelectionInput<'_>, w: &AoiWeights) -> f64 {
    if input.available.contains(&node) {
        1.0
    } else {
        w.alpha
    }
}

pub fn score_node_aoi(node: NodeId, input: &SelectionInput<'_>, w: &AoiWeights) -> Result<f64> {
    let mut sum = 0.0;
    for (&target, &age) in input.ages {
        sum += f_value(node, target, age, input.knowledge, w)?;
    }
    Ok(discount(node, input, w) * sum)
}

/// The objective is additive over nodes, so its maximum over `C`-subsets is the
/// `C` best individual scores.
pub fn select_aoi(input: &SelectionInput<'_>, w: &AoiWeights) -> Result<BTreeSet<NodeId>> {
    let scored = node_ids(input.node_count)
        .map(|k| Ok((k, score_node_aoi(k, input, w)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(top_n(scored, input.capacity).into_iter().collect())
}

/// Greedy variant in which a target counts as fresh (age 1) for the remaining
/// candidates once an already chosen node is known to see it.
pub fn select_aoi_marginal(input: &SelectionInput<'_>, w: &AoiWeights) -> Result<BTreeSet<NodeId>> {
    let mut ages: BTreeMap<TargetId, u32> = input.ages.clone();
    let mut chosen = BTreeSet::new();
    while chosen.len() < input.capacity {
        let view = SelectionInput {
            ages: &ages,
            ..*input
        };
        let scored = node_ids(input.node_count)
            .filter(|k| !chosen.contains(k))
            .map(|k| Ok((k, score_node_aoi(k, &view, w)?)))
            .collect::<Result<Vec<_>>>()?;
        let Some(&best) = top_n(scored, 1).first() else {
            break;
        };
        chosen.insert(best);
        for target in input.knowledge.sees(best) {
            if let Some(age) = ages.get_mut(&target) {
                *age = 1;
            }
        }
    }
    Ok(chosen)
}

#[derive(Clone, Debug)]
pub struct AoiStrategy {
    pub weights: AoiWeights,
    pub marginal: bool,
}

impl AoiStrategy {
    pub const NAME: &'static str = "aoi";

    pub fn from_params(p: &SimParams) -> Self {
        AoiStrategy {
            weights: AoiWeights::from_params(p),
            marginal: p.aoi_marginal,
        }
    }
}

impl SelectionStrategy for AoiStrategy {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn select(&mut self, input: &SelectionInput<'_>, _rng: &mut SimRng) -> Result<BTreeSet<NodeId>> {
        if self.marginal {
            select_aoi_marginal(input, &self.weights)
        } else {
            select_aoi(input, &self.weights)
        }
    }
}
