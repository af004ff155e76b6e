//! Monte Carlo batches and their order-independent aggregation.

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::episode::{run_episode, EpisodeLog};
use crate::error::Result;
use crate::metrics::ErrorHistogram;
use crate::selection::StrategyRegistry;

/// One (strategy, capacity) cell of an experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Job {
    pub strategy: String,
    pub capacity: usize,
}

impl Job {
    pub fn new(strategy: impl Into<String>, capacity: usize) -> Self {
        Job {
            strategy: strategy.into(),
            capacity,
        }
    }
}

/// Running mean that returns `x` exactly when fed copies of `x`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RunningMean {
    mean: f64,
    n: u64,
}

impl RunningMean {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.mean += (x - self.mean) / self.n as f64;
    }

    pub fn get(&self) -> Option<f64> {
        (self.n > 0).then_some(self.mean)
    }

    pub fn count(&self) -> u64 {
        self.n
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    /// Standard error of the mean across runs; 0 for a single run.
    pub stderr: f64,
    pub n: usize,
}

impl Stat {
    pub fn from_values(values: &[f64]) -> Option<Stat> {
        if values.is_empty() {
            return None;
        }
        let mut m = RunningMean::default();
        for &v in values {
            m.push(v);
        }
        let mean = m.get()?;
        let n = values.len();
        let stderr = if n < 2 {
            0.0
        } else {
            let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        };
        Some(Stat { mean, stderr, n })
    }
}

/// Steady-state reduction of one episode plus its raw per-period series.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeSummary {
    pub paoi: Option<f64>,
    pub mean_age: Option<f64>,
    pub missed: Option<f64>,
    pub total_active: Option<f64>,
    pub unobservable: Option<f64>,
    pub update_periods: u64,
    pub errors: ErrorHistogram,
    pub age_by_period: Vec<Option<f64>>,
    pub missed_by_period: Vec<(usize, usize)>,
}

impl EpisodeSummary {
    pub fn from_log(log: &EpisodeLog, thresholds: &[f64]) -> Self {
        let mut errors = ErrorHistogram::new(thresholds.to_vec());
        let mut age = RunningMean::default();
        let mut missed = RunningMean::default();
        let mut active = RunningMean::default();
        let mut unobs = RunningMean::default();
        for s in log.periods.iter().filter(|s| s.period >= log.warmup_periods) {
            if let Some(a) = s.mean_age {
                age.push(a);
            }
            missed.push(s.missed as f64);
            active.push(s.total_active as f64);
            unobs.push(s.unobservable as f64);
            errors.extend(s.errors.iter().copied());
        }
        EpisodeSummary {
            paoi: log.ages.mean_peak_age(),
            mean_age: age.get(),
            missed: missed.get(),
            total_active: active.get(),
            unobservable: unobs.get(),
            update_periods: log.periods.len() as u64,
            errors,
            age_by_period: log.periods.iter().map(|s| s.mean_age).collect(),
            missed_by_period: log.periods.iter().map(|s| (s.missed, s.total_active)).collect(),
        }
    }
}

/// Cross-run results for one job.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub job: Job,
    pub runs: usize,
    pub paoi: Option<Stat>,
    pub mean_age: Option<Stat>,
    pub missed: Option<Stat>,
    pub total_active: Option<Stat>,
    pub unobservable: Option<Stat>,
    pub update_periods: Option<Stat>,
    pub per_run_paoi: Vec<Option<f64>>,
    pub errors: ErrorHistogram,
    /// Mean over runs of the active-track mean age at each period index.
    pub age_by_period: Vec<Option<f64>>,
    /// `(mean missed, mean active)` over runs at each period index.
    pub missed_by_period: Vec<(f64, f64)>,
}

impl Aggregate {
    pub fn error_cdf(&self) -> Vec<f64> {
        self.errors.fractions()
    }
}

fn stat_of(values: impl Iterator<Item = Option<f64>>) -> Option<Stat> {
    let v: Vec<f64> = values.flatten().collect();
    Stat::from_values(&v)
}

/// Combines episode summaries in the order given.
pub fn aggregate(job: Job, summaries: &[EpisodeSummary], thresholds: &[f64]) -> Aggregate {
    let mut errors = ErrorHistogram::new(thresholds.to_vec());
    for s in summaries {
        errors.merge(&s.errors);
    }
    let longest = summaries.iter().map(|s| s.age_by_period.len()).max().unwrap_or(0);
    let mut age_by_period = vec![RunningMean::default(); longest];
    let mut missed_by_period = vec![(RunningMean::default(), RunningMean::default()); longest];
    for s in summaries {
        for (i, a) in s.age_by_period.iter().enumerate() {
            if let Some(a) = a {
                age_by_period[i].push(*a);
            }
        }
        for (i, &(m, t)) in s.missed_by_period.iter().enumerate() {
            missed_by_period[i].0.push(m as f64);
            missed_by_period[i].1.push(t as f64);
        }
    }
    Aggregate {
        job,
        runs: summaries.len(),
        paoi: stat_of(summaries.iter().map(|s| s.paoi)),
        mean_age: stat_of(summaries.iter().map(|s| s.mean_age)),
        missed: stat_of(summaries.iter().map(|s| s.missed)),
        total_active: stat_of(summaries.iter().map(|s| s.total_active)),
        unobservable: stat_of(summaries.iter().map(|s| s.unobservable)),
        update_periods: stat_of(summaries.iter().map(|s| Some(s.update_periods as f64))),
        per_run_paoi: summaries.iter().map(|s| s.paoi).collect(),
        errors,
        age_by_period: age_by_period.iter().map(RunningMean::get).collect(),
        missed_by_period: missed_by_period
            .iter()
            .map(|(m, t)| (m.get().unwrap_or(0.0), t.get().unwrap_or(0.0)))
            .collect(),
    }
}

/// Runs `config.runs` episodes (seeds `seed + i`) for every job. With
/// `config.parallel` the episodes are spread over the rayon pool; results are
/// identical either way.
pub fn run_monte_carlo(config: &RunConfig, jobs: &[Job]) -> Result<Vec<Aggregate>> {
    config.validate()?;
    let thresholds = config.thresholds();
    let registry = StrategyRegistry::builtin();
    let tasks: Vec<(usize, u64)> = (0..jobs.len())
        .flat_map(|j| (0..u64::from(config.runs)).map(move |i| (j, i)))
        .collect();

    let run_one = |&(j, i): &(usize, u64)| -> Result<EpisodeSummary> {
        let job = &jobs[j];
        let cfg = config.with_job(&job.strategy, job.capacity);
        cfg.validate()?;
        let params = cfg.sim_params();
        let strategy = registry.create(&job.strategy, &params)?;
        let seed = config.seed.wrapping_add(i);
        let log = run_episode(&params, strategy, seed, config.cpis, config.warmup_periods)?;
        Ok(EpisodeSummary::from_log(&log, &thresholds))
    };
    let summaries: Vec<EpisodeSummary> = if config.parallel {
        tasks.par_iter().map(run_one).collect::<Result<_>>()?
    } else {
        tasks.iter().map(run_one).collect::<Result<_>>()?
    };

    let per_job = config.runs as usize;
    Ok(jobs
        .iter()
        .zip(summaries.chunks(per_job))
        .map(|(job, chunk)| aggregate(job.clone(), chunk, &thresholds))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn running_mean_is_idempotent() {
        let mut m = RunningMean::default();
        for _ in 0..7 {
            m.push(0.1);
        }
        assert_eq!(m.get(), Some(0.1));
    }

    #[test]
    fn stat_of_single_value() {
        let s = Stat::from_values(&[2.5]).unwrap();
        assert_eq!((s.mean, s.stderr, s.n), (2.5, 0.0, 1));
        let s = Stat::from_values(&[1.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert!((s.stderr - 1.0).abs() < 1e-12);
        assert!(Stat::from_values(&[]).is_none());
    }
}
