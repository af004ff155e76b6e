use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Region {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Region {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn square(side: f64) -> Self {
        Region::new(0.0, 0.0, side, side)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (self.x_min..=self.x_max).contains(&x) && (self.y_min..=self.y_max).contains(&y)
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.x_max > self.x_min && self.y_max > self.y_min)
    }
}

impl Default for Region {
    fn default() -> Self {
        Region::square(5000.0)
    }
}

/// Scenario, node and fusion-center parameters shared by every module.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimParams {
    /// New-target Poisson rate per CPI.
    pub p_s: f64,
    /// Per-CPI retirement probability.
    pub p_r: f64,
    /// Per-CPI velocity change probability.
    pub p_v: f64,
    /// Per-node, per-target observability probability.
    pub p_o: f64,
    /// Inverse-Gamma shape of the measurement variances.
    pub a: f64,
    /// Inverse-Gamma scale of the measurement variances.
    pub b: f64,
    /// Score discount for nodes without a raised flag.
    pub alpha: f64,
    /// Score for (node, target) pairs whose visibility is unknown.
    pub beta: f64,
    /// Score for (node, target) pairs known to be invisible.
    pub gamma: f64,
    /// Innovation flag threshold, meters.
    pub d_i: f64,
    /// CPIs a raised flag persists without a new trigger.
    pub a_max: u32,
    /// Update periods without observation before a node drops a live track.
    pub tau: u32,
    /// Probability that an update period fires in a CPI.
    pub p_u: f64,
    /// Reports collected per update period (C).
    pub capacity: usize,
    /// Number of radar nodes (M).
    pub nodes: usize,
    /// Long-run mean number of active targets.
    pub n_bar: f64,
    pub region: Region,
    pub speed_min: f64,
    pub speed_max: f64,
    /// White-noise acceleration intensity of the node filters, m^2/s^3.
    pub q: f64,
    /// Seconds per CPI.
    pub dt: f64,
    /// Start episodes with a Poisson(n_bar) population instead of an empty scene.
    pub initial_population: bool,
    /// Fusion-center tracks are propagated at constant velocity between refreshes.
    pub fc_extrapolate: bool,
    /// Use the marginal-gain greedy form of the age objective.
    pub aoi_marginal: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            p_s: 0.1,
            p_r: 0.005,
            p_v: 0.01,
            p_o: 0.2,
            a: 2.0,
            b: 1.0,
            alpha: 0.01,
            beta: 1.0,
            gamma: -1.0,
            d_i: 5.0,
            a_max: 20,
            tau: 2,
            p_u: 0.25,
            capacity: 5,
            nodes: 15,
            n_bar: 20.0,
            region: Region::default(),
            speed_min: 5.0,
            speed_max: 15.0,
            q: 0.05,
            dt: 1.0,
            initial_population: true,
            fc_extrapolate: false,
            aoi_marginal: false,
        }
    }
}

fn probability(key: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::config(key, format!("{value} is not a probability in [0, 1]")))
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_s >= 0.0 && self.p_s.is_finite()) {
            return Err(Error::config("p_s", format!("{} must be a finite rate >= 0", self.p_s)));
        }
        probability("p_r", self.p_r)?;
        probability("p_v", self.p_v)?;
        probability("p_o", self.p_o)?;
        probability("p_u", self.p_u)?;
        if !(self.a > 1.0) {
            return Err(Error::config("a", format!("{} must exceed 1", self.a)));
        }
        if !(self.b > 0.0) {
            return Err(Error::config("b", format!("{} must be positive", self.b)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::config("alpha", format!("{} must lie in (0, 1]", self.alpha)));
        }
        if !self.beta.is_finite() {
            return Err(Error::config("beta", "must be finite"));
        }
        if !self.gamma.is_finite() {
            return Err(Error::config("gamma", "must be finite"));
        }
        if self.d_i.is_nan() || self.d_i < 0.0 {
            return Err(Error::config("d_i", format!("{} must be >= 0", self.d_i)));
        }
        if self.a_max == 0 {
            return Err(Error::config("a_max", "must be at least 1"));
        }
        if self.tau == 0 {
            return Err(Error::config("tau", "must be at least 1"));
        }
        if self.nodes == 0 {
            return Err(Error::config("nodes", "must be at least 1"));
        }
        if self.capacity == 0 {
            return Err(Error::config("capacity", "must be at least 1"));
        }
        if self.capacity > self.nodes {
            return Err(Error::config(
                "capacity",
                format!("{} exceeds the node count {}", self.capacity, self.nodes),
            ));
        }
        if !(self.n_bar >= 0.0 && self.n_bar.is_finite()) {
            return Err(Error::config("n_bar", format!("{} must be >= 0", self.n_bar)));
        }
        if self.region.is_degenerate() {
            return Err(Error::config("region", "must have positive width and height"));
        }
        if !(self.speed_min >= 0.0 && self.speed_min <= self.speed_max) {
            return Err(Error::config(
                "speed_min",
                format!("need 0 <= speed_min <= speed_max, got {} and {}", self.speed_min, self.speed_max),
            ));
        }
        if !(self.q >= 0.0 && self.q.is_finite()) {
            return Err(Error::config("q", format!("{} must be >= 0", self.q)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("dt", format!("{} must be positive", self.dt)));
        }
        Ok(())
    }
}
