//! Peak and mean age, track-error CDF, missed tracks and the unobservable floor.

use std::collections::BTreeMap;

use crate::environment::World;
use crate::fusion_center::FusionCenter;
use crate::radar_node::RadarNode;
use crate::TargetId;

/// Mean of the ages-at-refresh of one track; `None` with no refreshes.
pub fn peak_age(ages_at_update: &[u32]) -> Option<f64> {
    if ages_at_update.is_empty() {
        return None;
    }
    let sum: u64 = ages_at_update.iter().map(|&a| u64::from(a)).sum();
    Some(sum as f64 / ages_at_update.len() as f64)
}

/// Ages at refresh, `A_n`, per fusion-center track. `A_n` is the track's age in
/// the period just before the refresh, so back-to-back refreshes record 1.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AgeSeries {
    tracks: BTreeMap<TargetId, Vec<u32>>,
}

impl AgeSeries {
    pub fn new() -> Self {
        AgeSeries::default()
    }

    pub fn record(&mut self, target: TargetId, age_before_refresh: u32) {
        self.tracks.entry(target).or_default().push(age_before_refresh);
    }

    pub fn refresh_count(&self, target: TargetId) -> usize {
        self.tracks.get(&target).map_or(0, Vec::len)
    }

    pub fn ages(&self, target: TargetId) -> &[u32] {
        self.tracks.get(&target).map_or(&[], Vec::as_slice)
    }

    pub fn peak_age(&self, target: TargetId) -> Option<f64> {
        peak_age(self.ages(target))
    }

    /// Peak age averaged over every track with at least one refresh.
    pub fn mean_peak_age(&self) -> Option<f64> {
        let per_track: Vec<f64> = self.tracks.values().filter_map(|a| peak_age(a)).collect();
        if per_track.is_empty() {
            None
        } else {
            Some(per_track.iter().sum::<f64>() / per_track.len() as f64)
        }
    }
}

/// Mean age over the active fusion-center tracks.
pub fn mean_active_age(fc: &FusionCenter) -> Option<f64> {
    let tracks = fc.tracks();
    if tracks.is_empty() {
        return None;
    }
    let sum: u64 = tracks.values().map(|t| u64::from(t.age)).sum();
    Some(sum as f64 / tracks.len() as f64)
}

/// Fraction of `errors` at or below each threshold.
pub fn error_cdf(errors: &[f64], thresholds: &[f64]) -> Vec<f64> {
    let mut hist = ErrorHistogram::new(thresholds.to_vec());
    hist.extend(errors.iter().copied());
    hist.fractions()
}

/// Threshold grid with `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn threshold_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

pub fn default_thresholds() -> Vec<f64> {
    threshold_grid(0.0, 30.0, 60)
}

/// Mergeable counts behind an empirical CDF on a fixed threshold grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorHistogram {
    thresholds: Vec<f64>,
    /// `bins[i]` counts samples in `(t[i-1], t[i]]`; the last bin is above the grid.
    bins: Vec<u64>,
    total: u64,
}

impl ErrorHistogram {
    pub fn new(thresholds: Vec<f64>) -> Self {
        debug_assert!(thresholds.windows(2).all(|w| w[0] <= w[1]));
        let bins = vec![0; thresholds.len() + 1];
        ErrorHistogram {
            thresholds,
            bins,
            total: 0,
        }
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn add(&mut self, error: f64) {
        let i = self.thresholds.partition_point(|&t| t < error);
        self.bins[i] += 1;
        self.total += 1;
    }

    pub fn extend(&mut self, errors: impl IntoIterator<Item = f64>) {
        for e in errors {
            self.add(e);
        }
    }

    pub fn merge(&mut self, other: &ErrorHistogram) {
        assert_eq!(self.thresholds, other.thresholds, "threshold grids differ");
        for (a, b) in self.bins.iter_mut().zip(&other.bins) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn fractions(&self) -> Vec<f64> {
        let mut running = 0u64;
        self.thresholds
            .iter()
            .enumerate()
            .map(|(i, _)| {
                running += self.bins[i];
                if self.total == 0 {
                    0.0
                } else {
                    running as f64 / self.total as f64
                }
            })
            .collect()
    }
}

/// Live targets without an active fusion-center track.
pub fn missed_tracks(world: &World, fc: &FusionCenter) -> usize {
    world
        .active()
        .iter()
        .filter(|t| !fc.has_active_track(t.id))
        .count()
}

/// Live targets that no node can observe.
pub fn unobservable_count(world: &World, nodes: &[RadarNode]) -> usize {
    world
        .active()
        .iter()
        .filter(|t| nodes.iter().all(|n| !n.observable().contains(&t.id)))
        .count()
}

/// Expected number of targets invisible to all `m` nodes, `n_bar (1 - p_o)^m`.
pub fn expected_unobservable(n_bar: f64, p_o: f64, m: usize) -> f64 {
    n_bar * (1.0 - p_o).powi(m as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::SimParams;
    use crate::radar_node::{NodeReport, ReportEntry, ReportStatus};
    use crate::NodeId;
    use nalgebra::Vector2;
    use std::collections::BTreeSet;

    #[test]
    fn peak_age_examples() {
        assert_eq!(peak_age(&[1, 1, 1, 1]), Some(1.0));
        assert_eq!(peak_age(&[1, 3, 5]), Some(3.0));
        assert_eq!(peak_age(&[7]), Some(7.0));
        assert_eq!(peak_age(&[]), None);
    }

    #[test]
    fn series_skips_tracks_without_refresh() {
        let mut s = AgeSeries::new();
        s.record(TargetId(0), 1);
        s.record(TargetId(0), 3);
        s.record(TargetId(1), 6);
        assert_eq!(s.refresh_count(TargetId(0)), 2);
        assert_eq!(s.peak_age(TargetId(2)), None);
        assert_eq!(s.mean_peak_age(), Some(4.0));
        assert_eq!(AgeSeries::new().mean_peak_age(), None);
    }

    fn fc_with_ages(ages: &[u32]) -> FusionCenter {
        let mut fc = FusionCenter::new(&SimParams::default());
        let entries = (0..ages.len())
            .map(|i| ReportEntry {
                target_id: TargetId(i as u64),
                predicted_position: Vector2::zeros(),
                predicted_velocity: Vector2::zeros(),
                variance: 1.0,
                status: ReportStatus::New,
            })
            .collect();
        let sel = BTreeSet::from([NodeId(1)]);
        fc.ingest(&[NodeReport { node_id: NodeId(1), cpi: 0, entries }], &sel, 0)
            .unwrap();
        let max = ages.iter().copied().max().unwrap_or(1);
        for step in 1..max {
            let entries = ages
                .iter()
                .enumerate()
                .filter(|&(_, &a)| a <= max - step)
                .map(|(i, _)| ReportEntry {
                    target_id: TargetId(i as u64),
                    predicted_position: Vector2::zeros(),
                    predicted_velocity: Vector2::zeros(),
                    variance: 1.0,
                    status: ReportStatus::Active,
                })
                .collect();
            fc.ingest(&[NodeReport { node_id: NodeId(1), cpi: 0, entries }], &sel, u64::from(step))
                .unwrap();
        }
        fc
    }

    #[test]
    fn mean_age_examples() {
        assert_eq!(mean_active_age(&fc_with_ages(&[1, 1, 1])), Some(1.0));
        let fc = fc_with_ages(&[1, 3]);
        assert_eq!(fc.ages().values().copied().collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(mean_active_age(&fc), Some(2.0));
        assert_eq!(mean_active_age(&FusionCenter::new(&SimParams::default())), None);
    }

    #[test]
    fn cdf_examples() {
        assert_eq!(error_cdf(&[1.0, 2.0, 3.0], &[2.0]), vec![2.0 / 3.0]);
        assert_eq!(error_cdf(&[1.0, 2.0, 3.0], &[0.5, 3.5]), vec![0.0, 1.0]);
        let cdf = error_cdf(&[0.3, 5.0, 2.2, 9.9, 1.0], &default_thresholds());
        assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn histogram_merge_matches_pooled() {
        let th = threshold_grid(0.0, 10.0, 11);
        let (a, b) = ([0.5, 3.0, 12.0], [7.0, 7.0, 0.0, 10.0]);
        let mut ha = ErrorHistogram::new(th.clone());
        ha.extend(a);
        let mut hb = ErrorHistogram::new(th.clone());
        hb.extend(b);
        ha.merge(&hb);
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        assert_eq!(ha.fractions(), error_cdf(&pooled, &th));
    }

    #[test]
    fn default_grid_spans_zero_to_thirty() {
        let g = default_thresholds();
        assert_eq!(g.len(), 60);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[59], 30.0);
    }

    #[test]
    fn unobservable_floor() {
        let v = expected_unobservable(20.0, 0.2, 15);
        assert!((v - 0.703687).abs() < 1e-6, "{v}");
        assert_eq!(expected_unobservable(20.0, 1.0, 15), 0.0);
        assert_eq!(expected_unobservable(20.0, 0.2, 0), 20.0);
    }
}
