//! Episode driver, Monte Carlo batches, configuration and output files.

pub mod config;
pub mod episode;
pub mod monte_carlo;
pub mod output;
pub mod trace;

pub use config::RunConfig;
pub use episode::{run_episode, CpiOutcome, Episode, EpisodeLog, PeriodSample};
pub use monte_carlo::{aggregate, run_monte_carlo, Aggregate, EpisodeSummary, Job, RunningMean, Stat};
pub use output::{fmt_sig6, write_outputs, write_trace};
pub use trace::{trace_node, TraceRow};
