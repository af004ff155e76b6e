//! CSV and JSON writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use super::config::RunConfig;
use super::monte_carlo::{Aggregate, Stat};
use super::trace::TraceRow;
use crate::error::{Error, Result};
use crate::metrics::expected_unobservable;

/// `%g`-style formatting with six significant digits.
pub fn fmt_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(BufWriter::new(file)))
}

pub fn write_error_cdf(path: &Path, aggregates: &[Aggregate]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["strategy", "capacity", "threshold_m", "fraction"])?;
    for agg in aggregates {
        for (t, f) in agg.errors.thresholds().iter().zip(agg.error_cdf()) {
            w.write_record([
                agg.job.strategy.clone(),
                agg.job.capacity.to_string(),
                fmt_sig6(*t),
                fmt_sig6(f),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_ages(path: &Path, aggregates: &[Aggregate]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["strategy", "capacity", "period", "mean_age"])?;
    for agg in aggregates {
        for (period, age) in agg.age_by_period.iter().enumerate() {
            let Some(age) = age else { continue };
            w.write_record([
                agg.job.strategy.clone(),
                agg.job.capacity.to_string(),
                period.to_string(),
                fmt_sig6(*age),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_missed(path: &Path, aggregates: &[Aggregate]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["strategy", "capacity", "period", "mean_missed", "total_active"])?;
    for agg in aggregates {
        for (period, (missed, total)) in agg.missed_by_period.iter().enumerate() {
            w.write_record([
                agg.job.strategy.clone(),
                agg.job.capacity.to_string(),
                period.to_string(),
                fmt_sig6(*missed),
                fmt_sig6(*total),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["cpi", "true_x", "true_y", "est_x", "est_y", "flag"])?;
    for r in rows {
        w.write_record([
            r.cpi.to_string(),
            fmt_sig6(r.true_position.x),
            fmt_sig6(r.true_position.y),
            fmt_sig6(r.estimate.x),
            fmt_sig6(r.estimate.y),
            u8::from(r.flag).to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

#[derive(Serialize)]
struct JobSummary<'a> {
    strategy: &'a str,
    capacity: usize,
    runs: usize,
    paoi: Option<Stat>,
    mean_age: Option<Stat>,
    missed: Option<Stat>,
    total_active: Option<Stat>,
    unobservable: Option<Stat>,
    update_periods: Option<Stat>,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: Value,
    expected_unobservable: f64,
    results: Vec<JobSummary<'a>>,
}

/// Config echo without the output location and execution mode, so identical
/// experiments produce identical files wherever and however they ran.
fn config_echo(config: &RunConfig) -> Result<Value> {
    let mut v = serde_json::to_value(config)?;
    if let Value::Object(map) = &mut v {
        map.remove("out_dir");
        map.remove("parallel");
        map.insert("p_s".into(), Value::from(config.resolved_p_s()));
    }
    Ok(v)
}

pub fn write_summary(path: &Path, config: &RunConfig, aggregates: &[Aggregate]) -> Result<()> {
    let summary = Summary {
        config: config_echo(config)?,
        expected_unobservable: expected_unobservable(config.n_bar, config.p_o, config.nodes),
        results: aggregates
            .iter()
            .map(|a| JobSummary {
                strategy: &a.job.strategy,
                capacity: a.job.capacity,
                runs: a.runs,
                paoi: a.paoi,
                mean_age: a.mean_age,
                missed: a.missed,
                total_active: a.total_active,
                unobservable: a.unobservable,
                update_periods: a.update_periods,
            })
            .collect(),
    };
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, &summary)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Writes `summary.json`, `error_cdf.csv`, `ages.csv` and `missed.csv`.
pub fn write_outputs(dir: &Path, config: &RunConfig, aggregates: &[Aggregate]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_summary(&dir.join("summary.json"), config, aggregates)?;
    write_error_cdf(&dir.join("error_cdf.csv"), aggregates)?;
    write_ages(&dir.join("ages.csv"), aggregates)?;
    write_missed(&dir.join("missed.csv"), aggregates)?;
    Ok(())
}
