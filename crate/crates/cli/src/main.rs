use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use crn_core::runner::{run_monte_carlo, trace_node, write_outputs, write_trace, Job, RunConfig};
use crn_core::selection::StrategyRegistry;
use crn_core::NodeId;

#[derive(Parser)]
#[command(name = "crn-sim", about = "Cognitive radar network tracking simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat TOML file whose keys are run-config field names.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    cpis: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run episodes one after another.
    #[arg(long)]
    serial: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One strategy at one capacity.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        capacity: Option<usize>,
    },
    /// Every listed strategy at every listed capacity.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        capacities: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        strategies: Option<Vec<String>>,
    },
    /// Per-CPI truth, estimate and flag for one node's tracks.
    TraceNode {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        node: u32,
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        capacity: Option<usize>,
    },
    Version,
}

fn load(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(r) = common.runs {
        cfg.runs = r;
    }
    if let Some(c) = common.cpis {
        cfg.cpis = c;
    }
    if let Some(o) = &common.out {
        cfg.out_dir = o.clone();
    }
    if common.serial {
        cfg.parallel = false;
    }
    Ok(cfg)
}

fn execute(cfg: &RunConfig, jobs: &[Job]) -> Result<()> {
    cfg.validate()?;
    let aggregates = run_monte_carlo(cfg, jobs)?;
    write_outputs(&cfg.out_dir, cfg, &aggregates)
        .with_context(|| format!("writing outputs to {}", cfg.out_dir.display()))?;
    for a in &aggregates {
        let paoi = a.paoi.map_or("n/a".to_string(), |s| format!("{:.4} ± {:.4}", s.mean, s.stderr));
        println!("{} C={}: PAoI {}", a.job.strategy, a.job.capacity, paoi);
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { common, strategy, capacity } => {
            let mut cfg = load(&common)?;
            if let Some(s) = strategy {
                cfg.strategy = s;
            }
            if let Some(c) = capacity {
                cfg.capacity = c;
            }
            let job = Job::new(cfg.strategy.clone(), cfg.capacity);
            execute(&cfg, &[job])
        }
        Command::Sweep { common, capacities, strategies } => {
            let mut cfg = load(&common)?;
            if let Some(c) = capacities {
                cfg.capacities = c;
            }
            if let Some(s) = strategies {
                cfg.strategies = s;
            }
            let jobs: Vec<Job> = cfg
                .strategies
                .iter()
                .flat_map(|s| cfg.capacities.iter().map(move |&c| Job::new(s.clone(), c)))
                .collect();
            execute(&cfg, &jobs)
        }
        Command::TraceNode { common, node, strategy, capacity } => {
            let mut cfg = load(&common)?;
            if let Some(s) = strategy {
                cfg.strategy = s;
            }
            if let Some(c) = capacity {
                cfg.capacity = c;
            }
            cfg.validate()?;
            let params = cfg.sim_params();
            let strat = StrategyRegistry::builtin().create(&cfg.strategy, &params)?;
            let rows = trace_node(&params, strat, cfg.seed, cfg.cpis, NodeId(node))?;
            std::fs::create_dir_all(&cfg.out_dir)
                .with_context(|| format!("creating {}", cfg.out_dir.display()))?;
            let path = cfg.out_dir.join("trace.csv");
            write_trace(&path, &rows)?;
            println!("{} rows written to {}", rows.len(), path.display());
            Ok(())
        }
        Command::Version => {
            println!("crn-sim {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}
