//! One episode: the CPI loop with randomly timed update periods.

use std::collections::BTreeSet;

use rand::Rng;

use crate::environment::World;
use crate::error::Result;
use crate::fusion_center::{poll, FusionCenter, IngestOutcome};
use crate::metrics::{self, AgeSeries};
use crate::params::SimParams;
use crate::radar_node::{NodeStepEvents, RadarNode};
use crate::rng::{stream, SimRng, Stream};
use crate::selection::{SelectionInput, SelectionStrategy};
use crate::{node_ids, NodeId};

/// Metrics taken right after the fusion center ingests an update period.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodSample {
    pub period: u64,
    pub cpi: u64,
    pub mean_age: Option<f64>,
    pub errors: Vec<f64>,
    pub missed: usize,
    pub total_active: usize,
    pub unobservable: usize,
    pub available: usize,
    pub selected: Vec<NodeId>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeLog {
    pub strategy: String,
    pub capacity: usize,
    pub seed: u64,
    pub cpis: u64,
    pub periods: Vec<PeriodSample>,
    /// Ages at refresh, recorded from update period `warmup_periods` on.
    pub ages: AgeSeries,
    pub warmup_periods: u64,
}

/// What happened in one CPI.
#[derive(Clone, Debug, Default)]
pub struct CpiOutcome {
    pub node_events: Vec<NodeStepEvents>,
    pub update: Option<(PeriodSample, IngestOutcome)>,
}

pub struct Episode {
    params: SimParams,
    world: World,
    nodes: Vec<RadarNode>,
    fc: FusionCenter,
    strategy: Box<dyn SelectionStrategy>,
    env_rng: SimRng,
    coin_rng: SimRng,
    strategy_rng: SimRng,
    periods: u64,
    ages: AgeSeries,
    warmup_periods: u64,
}

impl Episode {
    pub fn new(params: SimParams, strategy: Box<dyn SelectionStrategy>, seed: u64) -> Self {
        let mut env_rng = stream(seed, Stream::Environment);
        let world = World::new(&params, &mut env_rng);
        let nodes = node_ids(params.nodes)
            .map(|k| RadarNode::new(k, &params, stream(seed, Stream::Node(k))))
            .collect();
        Episode {
            fc: FusionCenter::new(&params),
            world,
            nodes,
            strategy,
            env_rng,
            coin_rng: stream(seed, Stream::UpdateCoin),
            strategy_rng: stream(seed, Stream::Strategy),
            periods: 0,
            ages: AgeSeries::new(),
            warmup_periods: 0,
            params,
        }
    }

    pub fn with_warmup(mut self, periods: u64) -> Self {
        self.warmup_periods = periods;
        self
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn nodes(&self) -> &[RadarNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &RadarNode {
        &self.nodes[id.0 as usize - 1]
    }

    pub fn fusion_center(&self) -> &FusionCenter {
        &self.fc
    }

    pub fn update_periods(&self) -> u64 {
        self.periods
    }

    pub fn age_series(&self) -> &AgeSeries {
        &self.ages
    }

    /// Advances the scene one CPI, lets every node observe it, then fires an
    /// update period with probability `p_u`.
    pub fn step(&mut self) -> Result<CpiOutcome> {
        self.world.step(&self.params, &mut self.env_rng);
        let mut out = CpiOutcome {
            node_events: Vec::with_capacity(self.nodes.len()),
            update: None,
        };
        for node in &mut self.nodes {
            out.node_events.push(node.cpi_step(&self.world, &self.params)?);
        }
        if self.coin_rng.random_bool(self.params.p_u) {
            out.update = Some(self.update_period()?);
        }
        Ok(out)
    }

    fn update_period(&mut self) -> Result<(PeriodSample, IngestOutcome)> {
        let period = self.periods;
        self.periods += 1;
        let cpi = self.world.cpi;

        let availability = poll(&self.nodes, period);
        let ages = self.fc.ages();
        let input = SelectionInput {
            period,
            node_count: self.params.nodes,
            capacity: self.params.capacity,
            available: &availability.available,
            ages: &ages,
            knowledge: self.fc.knowledge(),
        };
        let selected: BTreeSet<NodeId> = self.strategy.select(&input, &mut self.strategy_rng)?;
        debug_assert_eq!(selected.len(), self.params.capacity);

        let mut reports = Vec::with_capacity(selected.len());
        for &k in &selected {
            let node = &mut self.nodes[k.0 as usize - 1];
            node.clear_flag();
            reports.push(node.build_report(cpi));
        }
        for r in &reports {
            self.strategy.observe(r);
        }
        let outcome = self.fc.ingest(&reports, &selected, period)?;
        if period >= self.warmup_periods {
            for &(id, age) in &outcome.refreshed {
                self.ages.record(id, age);
            }
        }
        for node in &mut self.nodes {
            node.end_update_period(cpi, &self.params);
        }

        let sample = PeriodSample {
            period,
            cpi,
            mean_age: metrics::mean_active_age(&self.fc),
            errors: self.fc.track_error(&self.world).into_values().collect(),
            missed: metrics::missed_tracks(&self.world, &self.fc),
            total_active: self.world.active_count(),
            unobservable: metrics::unobservable_count(&self.world, &self.nodes),
            available: availability.available.len(),
            selected: selected.into_iter().collect(),
        };
        Ok((sample, outcome))
    }
}

/// Runs `cpis` CPIs and returns the per-period log.
pub fn run_episode(
    params: &SimParams,
    strategy: Box<dyn SelectionStrategy>,
    seed: u64,
    cpis: u64,
    warmup_periods: u64,
) -> Result<EpisodeLog> {
    let name = strategy.name().to_string();
    let mut episode = Episode::new(params.clone(), strategy, seed).with_warmup(warmup_periods);
    let mut periods = Vec::with_capacity((cpis as f64 * params.p_u * 1.1) as usize + 8);
    for _ in 0..cpis {
        if let Some((sample, _)) = episode.step()?.update {
            periods.push(sample);
        }
    }
    Ok(EpisodeLog {
        strategy: name,
        capacity: params.capacity,
        seed,
        cpis,
        periods,
        ages: episode.ages,
        warmup_periods,
    })
}
