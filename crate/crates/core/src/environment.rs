//! Ground truth: target birth, constant-velocity motion, heading changes and
//! retirement, one CPI at a time.

use std::f64::consts::TAU;

use nalgebra::Vector2;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::params::SimParams;
use crate::TargetId;

#[derive(Clone, Debug, PartialEq)]
pub struct Target {
    pub id: TargetId,
    pub position: Vector2<f64>,
    pub velocity: Vector2<f64>,
    pub born_at: u64,
    pub retired_at: Option<u64>,
}

impl Target {
    pub fn is_active(&self) -> bool {
        self.retired_at.is_none()
    }

    pub fn speed(&self) -> f64 {
        self.velocity.norm()
    }
}

/// Number of targets entering the scene in one CPI, `Poisson(rate)`.
pub fn sample_new_target_count<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> u64 {
    if rate <= 0.0 {
        return 0;
    }
    let poisson = Poisson::new(rate).expect("finite positive Poisson rate");
    poisson.sample(rng) as u64
}

/// Draws a target uniformly over the region with uniform speed and heading.
pub fn spawn_target<R: Rng + ?Sized>(
    rng: &mut R,
    params: &SimParams,
    id: TargetId,
    cpi: u64,
) -> Target {
    let r = &params.region;
    let x = rng.random_range(r.x_min..=r.x_max);
    let y = rng.random_range(r.y_min..=r.y_max);
    let speed = if params.speed_max > params.speed_min {
        rng.random_range(params.speed_min..=params.speed_max)
    } else {
        params.speed_min
    };
    let heading = rng.random_range(0.0..TAU);
    Target {
        id,
        position: Vector2::new(x, y),
        velocity: Vector2::new(speed * heading.cos(), speed * heading.sin()),
        born_at: cpi,
        retired_at: None,
    }
}

/// Targets of one episode. `active` stays sorted by id.
#[derive(Clone, Debug, Default)]
pub struct World {
    pub cpi: u64,
    active: Vec<Target>,
    retired: Vec<Target>,
    next_id: u64,
}

impl World {
    pub fn empty() -> Self {
        World::default()
    }

    /// Scene at CPI 0. With `initial_population` the target count is drawn from the
    /// stationary birth-death law, `Poisson(n_bar)`.
    pub fn new<R: Rng + ?Sized>(params: &SimParams, rng: &mut R) -> Self {
        let mut world = World::empty();
        if params.initial_population {
            for _ in 0..sample_new_target_count(rng, params.n_bar) {
                world.spawn(params, rng);
            }
        }
        world
    }

    pub fn active(&self) -> &[Target] {
        &self.active
    }

    pub fn retired(&self) -> &[Target] {
        &self.retired
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, id: TargetId) -> bool {
        self.active.binary_search_by_key(&id, |t| t.id).is_ok()
    }

    pub fn active_target(&self, id: TargetId) -> Option<&Target> {
        self.active
            .binary_search_by_key(&id, |t| t.id)
            .ok()
            .map(|i| &self.active[i])
    }

    /// Looks up a target whether it is still active or already retired.
    pub fn target(&self, id: TargetId) -> Option<&Target> {
        self.active_target(id).or_else(|| {
            self.retired
                .binary_search_by_key(&id, |t| t.id)
                .ok()
                .map(|i| &self.retired[i])
        })
    }

    pub fn spawn<R: Rng + ?Sized>(&mut self, params: &SimParams, rng: &mut R) -> TargetId {
        let id = TargetId(self.next_id);
        self.next_id += 1;
        self.active.push(spawn_target(rng, params, id, self.cpi));
        id
    }

    /// Inserts a hand-built target, assigning it the next id.
    pub fn insert(&mut self, mut target: Target) -> TargetId {
        let id = TargetId(self.next_id);
        self.next_id += 1;
        target.id = id;
        target.born_at = self.cpi;
        target.retired_at = None;
        self.active.push(target);
        id
    }

    /// Advances one CPI: move, turn, retire, then spawn arrivals.
    pub fn step<R: Rng + ?Sized>(&mut self, params: &SimParams, rng: &mut R) {
        let next = self.cpi + 1;
        let mut still_active = Vec::with_capacity(self.active.len() + 1);
        let mut any_retired = false;
        for mut target in self.active.drain(..) {
            target.position += target.velocity * params.dt;
            if rng.random_bool(params.p_v) {
                let speed = target.speed();
                let heading = rng.random_range(0.0..TAU);
                target.velocity = Vector2::new(speed * heading.cos(), speed * heading.sin());
            }
            if rng.random_bool(params.p_r) {
                target.retired_at = Some(next);
                self.retired.push(target);
                any_retired = true;
            } else {
                still_active.push(target);
            }
        }
        self.active = still_active;
        if any_retired {
            self.retired.sort_by_key(|t| t.id);
        }
        self.cpi = next;
        for _ in 0..sample_new_target_count(rng, params.p_s) {
            self.spawn(params, rng);
        }
    }
}
