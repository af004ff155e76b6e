//! One radar node: target admission, per-CPI filtering, the interesting-update
//! flag, and reports for the fusion center.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::Vector2;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::environment::World;
use crate::error::{Error, Result};
use crate::kalman::{self, FilterTrack, MeasurementModel, MotionModel};
use crate::params::SimParams;
use crate::rng::SimRng;
use crate::{NodeId, TargetId};

/// Localization variance for one (node, target) pair: inverse-Gamma(a, b),
/// drawn as `b / Gamma(a, 1)`.
pub fn sample_meas_variance<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    let gamma = Gamma::new(a, 1.0).expect("validated inverse-Gamma shape");
    b / gamma.sample(rng)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Visibility {
    Observable(f64),
    Unobservable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Active,
    New,
    Retired,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportEntry {
    pub target_id: TargetId,
    pub predicted_position: Vector2<f64>,
    pub predicted_velocity: Vector2<f64>,
    pub variance: f64,
    pub status: ReportStatus,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeReport {
    pub node_id: NodeId,
    pub cpi: u64,
    pub entries: Vec<ReportEntry>,
}

/// Position fix handed to a node for one target in one CPI.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub target_id: TargetId,
    pub position: Vector2<f64>,
}

/// What happened inside one node during one CPI.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NodeStepEvents {
    /// `(target, ||z - predicted||)` for every track updated this CPI.
    pub innovations: Vec<(TargetId, f64)>,
    pub started: Vec<TargetId>,
    pub retired: Vec<TargetId>,
    /// Whether the flag was (re)raised this CPI.
    pub raised: bool,
}

impl NodeStepEvents {
    /// True if `target` contributed a flag trigger this CPI.
    pub fn triggered_by(&self, target: TargetId, d_i: f64) -> bool {
        self.started.contains(&target)
            || self.retired.contains(&target)
            || self
                .innovations
                .iter()
                .any(|&(id, i)| id == target && i >= d_i)
    }
}

#[derive(Clone, Debug)]
struct RetiredNotice {
    target_id: TargetId,
    position: Vector2<f64>,
    velocity: Vector2<f64>,
    variance: f64,
}

#[derive(Clone, Debug)]
pub struct RadarNode {
    id: NodeId,
    observable: BTreeSet<TargetId>,
    unobservable: BTreeSet<TargetId>,
    variances: BTreeMap<TargetId, f64>,
    tracks: BTreeMap<TargetId, FilterTrack>,
    flag: bool,
    flag_age: u32,
    miss_counts: BTreeMap<TargetId, u32>,
    /// Every target id below this one has been classified.
    classified_below: u64,
    reported: BTreeSet<TargetId>,
    pending_retired: Vec<RetiredNotice>,
    last_period_cpi: Option<u64>,
    motion: MotionModel,
    rng: SimRng,
}

impl RadarNode {
    pub fn new(id: NodeId, params: &SimParams, rng: SimRng) -> Self {
        RadarNode {
            id,
            observable: BTreeSet::new(),
            unobservable: BTreeSet::new(),
            variances: BTreeMap::new(),
            tracks: BTreeMap::new(),
            flag: false,
            flag_age: 0,
            miss_counts: BTreeMap::new(),
            classified_below: 0,
            reported: BTreeSet::new(),
            pending_retired: Vec::new(),
            last_period_cpi: None,
            motion: MotionModel::constant_velocity(params.dt, params.q),
            rng,
        }
    }

    pub fn id(&self) -> NodeId {
        self.id
    }

    pub fn flag(&self) -> bool {
        self.flag
    }

    pub fn flag_age(&self) -> u32 {
        self.flag_age
    }

    pub fn observable(&self) -> &BTreeSet<TargetId> {
        &self.observable
    }

    pub fn unobservable(&self) -> &BTreeSet<TargetId> {
        &self.unobservable
    }

    pub fn variance(&self, target: TargetId) -> Option<f64> {
        self.variances.get(&target).copied()
    }

    pub fn tracks(&self) -> &BTreeMap<TargetId, FilterTrack> {
        &self.tracks
    }

    pub fn track(&self, target: TargetId) -> Option<&FilterTrack> {
        self.tracks.get(&target)
    }

    pub fn miss_count(&self, target: TargetId) -> u32 {
        self.miss_counts.get(&target).copied().unwrap_or(0)
    }

    /// Fusion center acknowledgement after selecting this node.
    pub fn clear_flag(&mut self) {
        self.flag = false;
    }

    fn is_classified(&self, target: TargetId) -> bool {
        target.0 < self.classified_below
            || self.observable.contains(&target)
            || self.unobservable.contains(&target)
    }

    /// Records a fixed visibility decision for a new target.
    pub fn classify(&mut self, target: TargetId, visibility: Visibility) -> Result<()> {
        if self.is_classified(target) {
            return Err(Error::DoubleClassification {
                node: self.id,
                target,
            });
        }
        match visibility {
            Visibility::Observable(sigma) => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidState {
                        node: self.id,
                        target,
                        sigma,
                    });
                }
                self.observable.insert(target);
                self.variances.insert(target, sigma);
            }
            Visibility::Unobservable => {
                self.unobservable.insert(target);
            }
        }
        self.classified_below = self.classified_below.max(target.0 + 1);
        Ok(())
    }

    /// Observable with probability `p_o`, drawing its variance on success.
    pub fn admit_target(&mut self, target: TargetId, params: &SimParams) -> Result<()> {
        if self.is_classified(target) {
            return Err(Error::DoubleClassification {
                node: self.id,
                target,
            });
        }
        let visibility = if self.rng.random_bool(params.p_o) {
            Visibility::Observable(sample_meas_variance(&mut self.rng, params.a, params.b))
        } else {
            Visibility::Unobservable
        };
        self.classify(target, visibility)
    }

    /// One CPI against ground truth: admit arrivals, take noisy fixes of every
    /// observable target and run the filter/flag logic.
    pub fn cpi_step(&mut self, world: &World, params: &SimParams) -> Result<NodeStepEvents> {
        for target in world.active() {
            if target.id.0 >= self.classified_below {
                self.admit_target(target.id, params)?;
            }
        }
        self.unobservable.retain(|id| world.is_active(*id));

        let mut observations = Vec::with_capacity(self.observable.len());
        for &id in &self.observable {
            let Some(target) = world.active_target(id) else {
                continue;
            };
            let std = self.variances[&id].sqrt();
            let noise = Vector2::new(
                self.rng.sample::<f64, _>(StandardNormal),
                self.rng.sample::<f64, _>(StandardNormal),
            );
            observations.push(Observation {
                target_id: id,
                position: target.position + noise * std,
            });
        }
        self.process_observations(world.cpi, &observations, |id| world.is_active(id), params)
    }

    /// Filter and flag logic given this CPI's fixes. Tracks without a fix are
    /// dropped at once if `is_alive` reports the target gone, and otherwise coast.
    pub fn process_observations(
        &mut self,
        cpi: u64,
        observations: &[Observation],
        is_alive: impl Fn(TargetId) -> bool,
        params: &SimParams,
    ) -> Result<NodeStepEvents> {
        let mut events = NodeStepEvents::default();
        let mut fixes: BTreeMap<TargetId, Vector2<f64>> = BTreeMap::new();
        for obs in observations {
            fixes.insert(obs.target_id, obs.position);
        }

        for (&id, &z) in &fixes {
            let sigma = match self.variances.get(&id) {
                Some(&s) => s,
                None => {
                    return Err(Error::InvalidState {
                        node: self.id,
                        target: id,
                        sigma: f64::NAN,
                    })
                }
            };
            let meas = MeasurementModel::new(sigma)?;
            match self.tracks.get_mut(&id) {
                Some(track) => {
                    kalman::predict(track, &self.motion);
                    let innovation = kalman::innovation_norm(track.position(), z);
                    kalman::update(track, z, &meas)?;
                    track.last_update_cpi = cpi;
                    events.innovations.push((id, innovation));
                }
                None => {
                    self.tracks.insert(id, kalman::init_track(z, sigma, cpi, id)?);
                    self.miss_counts.insert(id, 0);
                    events.started.push(id);
                }
            }
        }

        let unobserved: Vec<TargetId> = self
            .tracks
            .keys()
            .copied()
            .filter(|id| !fixes.contains_key(id))
            .collect();
        for id in unobserved {
            if is_alive(id) {
                if let Some(track) = self.tracks.get_mut(&id) {
                    kalman::predict(track, &self.motion);
                }
            } else {
                self.retire_track(id, true);
                events.retired.push(id);
            }
        }

        let triggered = !events.started.is_empty()
            || !events.retired.is_empty()
            || events.innovations.iter().any(|&(_, i)| i >= params.d_i);
        self.advance_flag(triggered, params.a_max);
        events.raised = triggered;
        Ok(events)
    }

    fn advance_flag(&mut self, triggered: bool, a_max: u32) {
        if triggered {
            self.flag = true;
            self.flag_age = 1;
        } else if self.flag {
            self.flag_age += 1;
        }
        if self.flag_age > a_max {
            self.flag = false;
        }
    }

    fn retire_track(&mut self, id: TargetId, departed: bool) {
        if let Some(track) = self.tracks.remove(&id) {
            self.pending_retired.push(RetiredNotice {
                target_id: id,
                position: track.position(),
                velocity: track.velocity(),
                variance: self.variances.get(&id).copied().unwrap_or(f64::NAN),
            });
        }
        self.miss_counts.remove(&id);
        if departed {
            self.observable.remove(&id);
            self.variances.remove(&id);
        }
    }

    /// Counts update periods without a fix and drops tracks after `tau` misses.
    /// Called once per update period for every node. Returns true if any track was
    /// dropped, which also raises the flag.
    pub fn end_update_period(&mut self, cpi: u64, params: &SimParams) -> bool {
        let since = self.last_period_cpi;
        self.last_period_cpi = Some(cpi);
        let mut dropped = Vec::new();
        for (&id, track) in &self.tracks {
            let seen = since.is_none_or(|p| track.last_update_cpi > p);
            let misses = self.miss_counts.entry(id).or_insert(0);
            if seen {
                *misses = 0;
            } else {
                *misses += 1;
                if *misses >= params.tau {
                    dropped.push(id);
                }
            }
        }
        for &id in &dropped {
            self.retire_track(id, false);
        }
        if !dropped.is_empty() {
            self.flag = true;
            self.flag_age = 1;
        }
        !dropped.is_empty()
    }

    /// Current estimates for every track plus notices for tracks retired since
    /// the previous report. Filter state is untouched.
    pub fn build_report(&mut self, cpi: u64) -> NodeReport {
        let mut entries = Vec::with_capacity(self.tracks.len() + self.pending_retired.len());
        for (&id, track) in &self.tracks {
            let status = if self.reported.insert(id) {
                ReportStatus::New
            } else {
                ReportStatus::Active
            };
            entries.push(ReportEntry {
                target_id: id,
                predicted_position: track.position(),
                predicted_velocity: track.velocity(),
                variance: self.variances[&id],
                status,
            });
        }
        for notice in self.pending_retired.drain(..) {
            self.reported.remove(&notice.target_id);
            entries.push(ReportEntry {
                target_id: notice.target_id,
                predicted_position: notice.position,
                predicted_velocity: notice.velocity,
                variance: notice.variance,
                status: ReportStatus::Retired,
            });
        }
        entries.sort_by_key(|e| e.target_id);
        NodeReport {
            node_id: self.id,
            cpi,
            entries,
        }
    }
}
