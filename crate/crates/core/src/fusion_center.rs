//! The fusion center: polling, report ingestion, fusion by averaging, track ages
//! and the node/target visibility table.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Vector2;

use crate::environment::World;
use crate::error::{Error, Result};
use crate::params::SimParams;
use crate::radar_node::{NodeReport, RadarNode, ReportStatus};
use crate::{NodeId, TargetId};

#[derive(Clone, Debug, PartialEq)]
pub struct FcTrack {
    pub target_id: TargetId,
    pub fused_position: Vector2<f64>,
    pub fused_velocity: Vector2<f64>,
    /// CPI at which the fused state was formed.
    pub fused_at_cpi: u64,
    /// Update periods since the last refresh; 1 right after a refresh.
    pub age: u32,
    /// Update period in which the track was created.
    pub created_at: u64,
    pub retired: bool,
}

impl FcTrack {
    /// Position estimate at `cpi`, optionally propagated at the fused velocity.
    pub fn position_at(&self, cpi: u64, dt: f64, extrapolate: bool) -> Vector2<f64> {
        if extrapolate && cpi > self.fused_at_cpi {
            self.fused_position + self.fused_velocity * ((cpi - self.fused_at_cpi) as f64 * dt)
        } else {
            self.fused_position
        }
    }
}

/// What the fusion center knows about a (node, target) pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairKnowledge {
    /// The node reported the target, with this variance.
    Sees(f64),
    CannotSee,
    Unknown,
}

/// Which nodes are known to see, or not see, which targets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FcKnowledge {
    sees: BTreeMap<NodeId, BTreeMap<TargetId, f64>>,
    cannot_see: BTreeMap<NodeId, BTreeSet<TargetId>>,
}

impl FcKnowledge {
    pub fn new() -> Self {
        FcKnowledge::default()
    }

    pub fn pair(&self, node: NodeId, target: TargetId) -> PairKnowledge {
        if let Some(&sigma) = self.sees.get(&node).and_then(|m| m.get(&target)) {
            PairKnowledge::Sees(sigma)
        } else if self.cannot_see.get(&node).is_some_and(|s| s.contains(&target)) {
            PairKnowledge::CannotSee
        } else {
            PairKnowledge::Unknown
        }
    }

    pub fn sees(&self, node: NodeId) -> impl Iterator<Item = TargetId> + '_ {
        self.sees.get(&node).into_iter().flat_map(|m| m.keys().copied())
    }

    pub fn cannot_see(&self, node: NodeId) -> impl Iterator<Item = TargetId> + '_ {
        self.cannot_see.get(&node).into_iter().flat_map(|s| s.iter().copied())
    }

    pub fn sees_target(&self, node: NodeId, target: TargetId) -> bool {
        matches!(self.pair(node, target), PairKnowledge::Sees(_))
    }

    pub fn insert_sees(&mut self, node: NodeId, target: TargetId, sigma: f64) {
        if let Some(set) = self.cannot_see.get_mut(&node) {
            set.remove(&target);
        }
        self.sees.entry(node).or_default().insert(target, sigma);
    }

    /// No-op if the node is already known to see the target.
    pub fn insert_cannot_see(&mut self, node: NodeId, target: TargetId) {
        if self.sees_target(node, target) {
            return;
        }
        self.cannot_see.entry(node).or_default().insert(target);
    }

    pub fn forget_pair(&mut self, node: NodeId, target: TargetId) {
        if let Some(m) = self.sees.get_mut(&node) {
            m.remove(&target);
        }
        if let Some(s) = self.cannot_see.get_mut(&node) {
            s.remove(&target);
        }
    }

    pub fn forget_target(&mut self, target: TargetId) {
        for m in self.sees.values_mut() {
            m.remove(&target);
        }
        for s in self.cannot_see.values_mut() {
            s.remove(&target);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AvailabilitySet {
    pub period: u64,
    pub available: BTreeSet<NodeId>,
}

/// Nodes whose interesting-update flag is raised.
pub fn poll(nodes: &[RadarNode], period: u64) -> AvailabilitySet {
    AvailabilitySet {
        period,
        available: nodes.iter().filter(|n| n.flag()).map(|n| n.id()).collect(),
    }
}

/// Track changes produced by one ingest.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IngestOutcome {
    /// Refreshed tracks with the age they had just before the refresh.
    pub refreshed: Vec<(TargetId, u32)>,
    pub created: Vec<TargetId>,
    pub retired: Vec<TargetId>,
}

#[derive(Clone, Debug)]
pub struct FusionCenter {
    tracks: BTreeMap<TargetId, FcTrack>,
    retired: BTreeMap<TargetId, FcTrack>,
    knowledge: FcKnowledge,
    dt: f64,
    extrapolate: bool,
}

impl FusionCenter {
    pub fn new(params: &SimParams) -> Self {
        FusionCenter {
            tracks: BTreeMap::new(),
            retired: BTreeMap::new(),
            knowledge: FcKnowledge::new(),
            dt: params.dt,
            extrapolate: params.fc_extrapolate,
        }
    }

    /// Active tracks, the fusion center's estimate of the live target set.
    pub fn tracks(&self) -> &BTreeMap<TargetId, FcTrack> {
        &self.tracks
    }

    pub fn retired_tracks(&self) -> &BTreeMap<TargetId, FcTrack> {
        &self.retired
    }

    pub fn knowledge(&self) -> &FcKnowledge {
        &self.knowledge
    }

    pub fn knowledge_mut(&mut self) -> &mut FcKnowledge {
        &mut self.knowledge
    }

    pub fn ages(&self) -> BTreeMap<TargetId, u32> {
        self.tracks.iter().map(|(&id, t)| (id, t.age)).collect()
    }

    pub fn has_active_track(&self, target: TargetId) -> bool {
        self.tracks.contains_key(&target)
    }

    pub fn position_of(&self, target: TargetId, cpi: u64) -> Option<Vector2<f64>> {
        self.tracks
            .get(&target)
            .map(|t| t.position_at(cpi, self.dt, self.extrapolate))
    }

    /// Applies the reports of the selected nodes for update period `period`.
    ///
    /// Fused states are unweighted running means of the reported estimates, so
    /// identical reports fuse to exactly that report. Every active
    /// track that is not refreshed ages by one period.
    pub fn ingest(
        &mut self,
        reports: &[NodeReport],
        selected: &BTreeSet<NodeId>,
        period: u64,
    ) -> Result<IngestOutcome> {
        let mut seen_nodes = BTreeSet::new();
        for r in reports {
            if !selected.contains(&r.node_id) {
                return Err(Error::UnselectedReport(r.node_id));
            }
            if !seen_nodes.insert(r.node_id) {
                return Err(Error::DuplicateReport(r.node_id));
            }
        }
        let mut ordered: Vec<&NodeReport> = reports.iter().collect();
        ordered.sort_by_key(|r| r.node_id);

        let mut outcome = IngestOutcome::default();
        let mut retiring = BTreeSet::new();
        let mut means: BTreeMap<TargetId, (Vector2<f64>, Vector2<f64>, u32)> = BTreeMap::new();
        let mut cpi = 0;
        for r in &ordered {
            cpi = cpi.max(r.cpi);
            for e in &r.entries {
                match e.status {
                    ReportStatus::Retired => {
                        retiring.insert(e.target_id);
                        self.knowledge.forget_pair(r.node_id, e.target_id);
                    }
                    ReportStatus::Active | ReportStatus::New => {
                        if self.retired.contains_key(&e.target_id) {
                            continue;
                        }
                        let acc = means
                            .entry(e.target_id)
                            .or_insert((Vector2::zeros(), Vector2::zeros(), 0));
                        acc.2 += 1;
                        let n = f64::from(acc.2);
                        acc.0 += (e.predicted_position - acc.0) / n;
                        acc.1 += (e.predicted_velocity - acc.1) / n;
                        self.knowledge.insert_sees(r.node_id, e.target_id, e.variance);
                    }
                }
            }
        }

        for &id in &retiring {
            means.remove(&id);
            self.knowledge.forget_target(id);
            if let Some(mut track) = self.tracks.remove(&id) {
                track.retired = true;
                self.retired.insert(id, track);
                outcome.retired.push(id);
            }
        }

        let mut touched = BTreeSet::new();
        for (id, (position, velocity, _)) in means {
            touched.insert(id);
            match self.tracks.get_mut(&id) {
                Some(track) => {
                    outcome.refreshed.push((id, track.age));
                    track.fused_position = position;
                    track.fused_velocity = velocity;
                    track.fused_at_cpi = cpi;
                    track.age = 1;
                }
                None => {
                    self.tracks.insert(
                        id,
                        FcTrack {
                            target_id: id,
                            fused_position: position,
                            fused_velocity: velocity,
                            fused_at_cpi: cpi,
                            age: 1,
                            created_at: period,
                            retired: false,
                        },
                    );
                    outcome.created.push(id);
                }
            }
        }
        for (id, track) in self.tracks.iter_mut() {
            if !touched.contains(id) {
                track.age += 1;
            }
        }

        // A report lists every track of its node, so an active target missing
        // from it is one the node cannot see.
        for r in &ordered {
            let listed: BTreeSet<TargetId> = r.entries.iter().map(|e| e.target_id).collect();
            for &id in self.tracks.keys() {
                if !listed.contains(&id) {
                    self.knowledge.insert_cannot_see(r.node_id, id);
                }
            }
        }
        Ok(outcome)
    }

    /// Distance from each active track to its live target at `world.cpi`. Tracks
    /// whose target already left the scene are skipped.
    pub fn track_error(&self, world: &World) -> BTreeMap<TargetId, f64> {
        self.tracks
            .iter()
            .filter_map(|(&id, track)| {
                let truth = world.active_target(id)?;
                let est = track.position_at(world.cpi, self.dt, self.extrapolate);
                Some((id, (est - truth.position).norm()))
            })
            .collect()
    }
}
