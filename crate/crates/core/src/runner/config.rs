use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::default_thresholds;
use crate::params::{Region, SimParams};
use crate::selection::StrategyRegistry;

/// Everything an experiment needs. Config files are flat TOML whose keys are
/// exactly these field names; absent keys take the defaults below.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Arrival rate; derived as `n_bar * p_r` when absent.
    pub p_s: Option<f64>,
    pub p_r: f64,
    pub p_v: f64,
    pub p_o: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub d_i: f64,
    pub a_max: u32,
    pub tau: u32,
    pub p_u: f64,
    pub capacity: usize,
    pub nodes: usize,
    pub n_bar: f64,
    /// `[x_min, y_min, x_max, y_max]` in meters.
    pub region: [f64; 4],
    pub speed_min: f64,
    pub speed_max: f64,
    pub q: f64,
    pub dt: f64,
    pub initial_population: bool,
    pub fc_extrapolate: bool,
    pub aoi_marginal: bool,

    pub strategy: String,
    /// Strategies run by `sweep`.
    pub strategies: Vec<String>,
    /// Capacities run by `sweep`.
    pub capacities: Vec<usize>,
    pub cpis: u64,
    pub runs: u32,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Error thresholds in meters; defaults to 60 points from 0 to 30 m.
    pub thresholds: Option<Vec<f64>>,
    /// Update periods at the start of each episode left out of steady-state aggregates.
    pub warmup_periods: u64,
    pub parallel: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = SimParams::default();
        let r = p.region;
        RunConfig {
            p_s: None,
            p_r: p.p_r,
            p_v: p.p_v,
            p_o: p.p_o,
            a: p.a,
            b: p.b,
            alpha: p.alpha,
            beta: p.beta,
            gamma: p.gamma,
            d_i: p.d_i,
            a_max: p.a_max,
            tau: p.tau,
            p_u: p.p_u,
            capacity: p.capacity,
            nodes: p.nodes,
            n_bar: p.n_bar,
            region: [r.x_min, r.y_min, r.x_max, r.y_max],
            speed_min: p.speed_min,
            speed_max: p.speed_max,
            q: p.q,
            dt: p.dt,
            initial_population: p.initial_population,
            fc_extrapolate: p.fc_extrapolate,
            aoi_marginal: p.aoi_marginal,
            strategy: "aoi".to_string(),
            strategies: vec!["aoi".into(), "ucb".into(), "random".into()],
            capacities: vec![2, 5, 10, 15],
            cpis: 10_000,
            runs: 50,
            seed: 1,
            out_dir: PathBuf::from("out"),
            thresholds: None,
            warmup_periods: 500,
            parallel: true,
        }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::ConfigParse(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        RunConfig::from_toml_str(&text)
    }

    pub fn resolved_p_s(&self) -> f64 {
        self.p_s.unwrap_or(self.n_bar * self.p_r)
    }

    pub fn sim_params(&self) -> SimParams {
        let [x_min, y_min, x_max, y_max] = self.region;
        SimParams {
            p_s: self.resolved_p_s(),
            p_r: self.p_r,
            p_v: self.p_v,
            p_o: self.p_o,
            a: self.a,
            b: self.b,
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            d_i: self.d_i,
            a_max: self.a_max,
            tau: self.tau,
            p_u: self.p_u,
            capacity: self.capacity,
            nodes: self.nodes,
            n_bar: self.n_bar,
            region: Region::new(x_min, y_min, x_max, y_max),
            speed_min: self.speed_min,
            speed_max: self.speed_max,
            q: self.q,
            dt: self.dt,
            initial_population: self.initial_population,
            fc_extrapolate: self.fc_extrapolate,
            aoi_marginal: self.aoi_marginal,
        }
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.thresholds.clone().unwrap_or_else(default_thresholds)
    }

    pub fn validate(&self) -> Result<()> {
        self.sim_params().validate()?;
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.cpis == 0 {
            return Err(Error::config("cpis", "must be at least 1"));
        }
        let registry = StrategyRegistry::builtin();
        if !registry.contains(&self.strategy) {
            return Err(Error::config("strategy", format!("unknown strategy `{}`", self.strategy)));
        }
        if let Some(bad) = self.strategies.iter().find(|s| !registry.contains(s)) {
            return Err(Error::config("strategies", format!("unknown strategy `{bad}`")));
        }
        if let Some(&bad) = self.capacities.iter().find(|&&c| c == 0 || c > self.nodes) {
            return Err(Error::config(
                "capacities",
                format!("{bad} must lie in 1..={}", self.nodes),
            ));
        }
        if let Some(th) = &self.thresholds {
            if th.is_empty() || th.iter().any(|t| !t.is_finite()) || th.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::config("thresholds", "must be a non-empty ascending list"));
            }
        }
        Ok(())
    }

    /// Copy with `capacity` and `strategy` replaced.
    pub fn with_job(&self, strategy: &str, capacity: usize) -> RunConfig {
        RunConfig {
            strategy: strategy.to_string(),
            capacity,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_takes_table_defaults() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        let p = cfg.sim_params();
        assert!((p.p_s - 0.1).abs() < 1e-12);
        assert_eq!(
            (p.p_r, p.p_v, p.p_o, p.a, p.b, p.alpha, p.beta, p.gamma),
            (0.005, 0.01, 0.2, 2.0, 1.0, 0.01, 1.0, -1.0)
        );
        assert_eq!((p.nodes, p.n_bar, p.p_u), (15, 20.0, 0.25));
    }

    #[test]
    fn arrival_rate_follows_mean_count() {
        let cfg = RunConfig::from_toml_str("n_bar = 20.0\np_r = 0.005\n").unwrap();
        assert!((cfg.resolved_p_s() - 0.1).abs() < 1e-12);
        let cfg = RunConfig::from_toml_str("n_bar = 40.0\n").unwrap();
        assert!((cfg.resolved_p_s() - 0.2).abs() < 1e-12);
        let cfg = RunConfig::from_toml_str("p_s = 0.3\n").unwrap();
        assert_eq!(cfg.resolved_p_s(), 0.3);
    }

    #[test]
    fn capacity_above_nodes_is_rejected() {
        let err = RunConfig::from_toml_str("capacity = 20\nnodes = 15\n").unwrap_err();
        assert!(err.to_string().contains("capacity"), "{err}");
    }

    #[test]
    fn unknown_key_is_named() {
        let err = RunConfig::from_toml_str("bogus_key = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn out_of_range_probability_is_named() {
        let err = RunConfig::from_toml_str("p_o = 1.5\n").unwrap_err();
        assert!(err.to_string().contains("p_o"), "{err}");
        let err = RunConfig::from_toml_str("strategy = \"greedy\"\n").unwrap_err();
        assert!(err.to_string().contains("strategy"), "{err}");
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig {
            thresholds: Some(vec![1.0, 2.0]),
            ..RunConfig::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(RunConfig::from_toml_str(&text).unwrap(), cfg);
    }
}
