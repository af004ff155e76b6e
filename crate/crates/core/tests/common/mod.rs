#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use crn_core::fusion_center::FcKnowledge;
use crn_core::kalman::{init_track, predict, update, MeasurementModel, MotionModel, INITIAL_VELOCITY_VARIANCE};
use crn_core::selection::{AoiWeights, SelectionInput};
use crn_core::{NodeId, TargetId};
use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pair {
    Sees(f64),
    Cannot,
    Unknown,
}

/// A synthetic selection problem kept in plain tables so the objective can be
/// evaluated without going through the library's scoring code.
#[derive(Clone, Debug)]
pub struct Instance {
    pub m: usize,
    pub c: usize,
    pub available: BTreeSet<NodeId>,
    pub ages: BTreeMap<TargetId, u32>,
    /// `pairs[k][j]`, node-major, targets in `ages` order.
    pub pairs: Vec<Vec<Pair>>,
    pub weights: AoiWeights,
}

impl Instance {
    pub fn random<R: Rng>(rng: &mut R, max_m: usize) -> Self {
        let m = rng.random_range(1..=max_m);
        let c = rng.random_range(1..=m);
        let n = rng.random_range(0..=10usize);
        let ages: BTreeMap<TargetId, u32> = (0..n)
            .map(|j| (TargetId(j as u64 * 3 + 1), rng.random_range(1..=8)))
            .collect();
        let available = (1..=m as u32)
            .filter(|_| rng.random_bool(0.5))
            .map(NodeId)
            .collect();
        let pairs = (0..m)
            .map(|_| {
                (0..n)
                    .map(|_| match rng.random_range(0..10) {
                        0..=3 => Pair::Sees(rng.random_range(0.05..5.0)),
                        4..=6 => Pair::Cannot,
                        _ => Pair::Unknown,
                    })
                    .collect()
            })
            .collect();
        Instance {
            m,
            c,
            available,
            ages,
            pairs,
            weights: AoiWeights {
                alpha: 0.01,
                beta: 1.0,
                gamma: -1.0,
            },
        }
    }

    pub fn knowledge(&self) -> FcKnowledge {
        let mut k = FcKnowledge::new();
        for (i, row) in self.pairs.iter().enumerate() {
            let node = NodeId(i as u32 + 1);
            for (&target, pair) in self.ages.keys().zip(row) {
                match *pair {
                    Pair::Sees(s) => k.insert_sees(node, target, s),
                    Pair::Cannot => k.insert_cannot_see(node, target),
                    Pair::Unknown => {}
                }
            }
        }
        k
    }

    pub fn with_input<T>(&self, f: impl FnOnce(&SelectionInput<'_>) -> T) -> T {
        let knowledge = self.knowledge();
        let input = SelectionInput {
            period: 0,
            node_count: self.m,
            capacity: self.c,
            available: &self.available,
            ages: &self.ages,
            knowledge: &knowledge,
        };
        f(&input)
    }

    pub fn node_value(&self, k: usize) -> f64 {
        let w = &self.weights;
        let raw: f64 = self
            .ages
            .values()
            .zip(&self.pairs[k])
            .map(|(&age, pair)| match *pair {
                Pair::Sees(s) => f64::from(age) / s,
                Pair::Cannot => w.gamma,
                Pair::Unknown => w.beta,
            })
            .sum();
        let scale = if self.available.contains(&NodeId(k as u32 + 1)) { 1.0 } else { w.alpha };
        scale * raw
    }

    pub fn objective(&self, subset: &BTreeSet<NodeId>) -> f64 {
        subset.iter().map(|k| self.node_value(k.0 as usize - 1)).sum()
    }

    /// Exhaustive maximum over every `C`-subset of the `M` nodes.
    pub fn brute_force_max(&self) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << self.m) {
            if mask.count_ones() as usize != self.c {
                continue;
            }
            let subset = (0..self.m as u32)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| NodeId(b + 1))
                .collect();
            best = best.max(self.objective(&subset));
        }
        best
    }
}

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Position/velocity increments of one axis under white-noise acceleration,
/// sampled through a hand-factored Cholesky of q*[dt^3/3, dt^2/2; dt^2/2, dt].
pub fn axis_noise(rng: &mut ChaCha8Rng, q: f64, dt: f64) -> (f64, f64) {
    let l11 = (q * dt.powi(3) / 3.0).sqrt();
    let l21 = q * dt.powi(2) / 2.0 / l11;
    let l22 = (q * dt - l21 * l21).sqrt();
    let (a, b) = (normal(rng), normal(rng));
    (l11 * a, l21 * a + l22 * b)
}

/// NIS of every update when the truth is drawn from the filter's own model,
/// including a velocity prior matching the filter's initial covariance.
pub fn matched_model_nis(seed: u64, tracks: u64, steps: usize) -> Vec<f64> {
    let (dt, q, sigma) = (1.0, 0.05, 0.8);
    let motion = MotionModel::constant_velocity(dt, q);
    let meas = MeasurementModel::new(sigma).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(tracks as usize * steps);
    for t in 0..tracks {
        let mut pos = Vector2::new(normal(&mut rng), normal(&mut rng)) * 100.0;
        let mut vel = Vector2::new(normal(&mut rng), normal(&mut rng)) * INITIAL_VELOCITY_VARIANCE.sqrt();
        let noise = |rng: &mut ChaCha8Rng| Vector2::new(normal(rng), normal(rng)) * sigma.sqrt();
        let mut track = init_track(pos + noise(&mut rng), sigma, 0, TargetId(t)).unwrap();
        for _ in 0..steps {
            let (px, vx) = axis_noise(&mut rng, q, dt);
            let (py, vy) = axis_noise(&mut rng, q, dt);
            pos += vel * dt + Vector2::new(px, py);
            vel += Vector2::new(vx, vy);
            predict(&mut track, &motion);
            out.push(update(&mut track, pos + noise(&mut rng), &meas).unwrap().nis());
        }
    }
    out
}

/// Largest position error of a noiseless constant-velocity replay from the
/// third update on.
pub fn noiseless_replay_error(steps: usize) -> f64 {
    let motion = MotionModel::constant_velocity(1.0, 0.0);
    let meas = MeasurementModel::new(1e-12).unwrap();
    let mut pos = Vector2::new(1200.0, -340.0);
    let vel = Vector2::new(7.5, -11.25);
    let mut track = init_track(pos, 1e-12, 0, TargetId(0)).unwrap();
    let mut worst: f64 = 0.0;
    for k in 1..=steps {
        pos += vel;
        predict(&mut track, &motion);
        update(&mut track, pos, &meas).unwrap();
        if k >= 3 {
            worst = worst.max((track.position() - pos).norm()).max((track.velocity() - vel).norm());
        }
    }
    worst
}
