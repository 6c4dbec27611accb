use std::collections::BTreeMap;

use chrono::{DateTime, Duration, Utc};

use crate::ingest::PopulationTable;
use crate::metrics::{bin_window, default_epoch, normalized_activity, ActivitySummary};
use crate::stats::{correlate, Degeneracy};
use crate::{CorrelationResult, Method, Normalization, Transform};

use super::AnalysisError;

/// Bins with fewer active regions than this get degenerate results.
pub const MIN_ACTIVE_REGIONS: usize = 3;

/// Contiguous run of equal-width bins measured from an epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesSpan {
    pub epoch: DateTime<Utc>,
    pub width: Duration,
    pub first: i64,
    pub last: i64,
}

impl SeriesSpan {
    pub fn bins(&self) -> std::ops::RangeInclusive<i64> {
        self.first..=self.last
    }

    pub fn start_of(&self, bin: i64) -> DateTime<Utc> {
        bin_window(bin, self.epoch, self.width).start
    }
}

impl Default for SeriesSpan {
    /// Daily bins from 2012-10-22 through 2012-11-11.
    fn default() -> Self {
        Self { epoch: default_epoch(), width: Duration::hours(24), first: -8, last: 12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesBin {
    pub bin: i64,
    pub bin_start: DateTime<Utc>,
    pub active_regions: usize,
    pub messages: u64,
    /// One result per method, in [`Method::ALL`] order.
    pub activity: Vec<CorrelationResult>,
    pub sentiment: Vec<CorrelationResult>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeries {
    pub normalization: Normalization,
    pub bins: Vec<SeriesBin>,
}

impl CorrelationSeries {
    pub fn coefficients(&self, method: Method) -> Vec<f64> {
        let i = Method::ALL.iter().position(|m| *m == method).expect("listed method");
        self.bins.iter().map(|b| b.activity[i].coefficient).collect()
    }
}

fn correlate_all(x: &[f64], y: &[f64], active: usize) -> Result<Vec<CorrelationResult>, AnalysisError> {
    Method::ALL
        .into_iter()
        .map(|m| {
            if active < MIN_ACTIVE_REGIONS {
                Ok(CorrelationResult::degenerate(m, Transform::Raw, x.len(), 0, Degeneracy::TooFewPairs))
            } else {
                Ok(correlate(x, y, m, Transform::Raw)?)
            }
        })
        .collect()
}

/// Per-bin correlation of per-capita damage with original-message activity
/// and with mean sentiment, over the regions active in that bin. `daily` is
/// keyed by `(region, bin)`; damage is a fixed snapshot in USD.
pub fn daily_correlation_series(
    daily: &BTreeMap<(String, i64), ActivitySummary>,
    damage: &BTreeMap<String, f64>,
    population: &PopulationTable,
    span: SeriesSpan,
    normalization: Normalization,
) -> Result<CorrelationSeries, AnalysisError> {
    let mut by_bin: BTreeMap<i64, Vec<(&str, &ActivitySummary)>> = BTreeMap::new();
    for ((region, bin), s) in daily {
        if span.bins().contains(bin) && s.is_active() {
            by_bin.entry(*bin).or_default().push((region, s));
        }
    }
    let mut bins = Vec::new();
    for bin in span.bins() {
        let active = by_bin.get(&bin).map(Vec::as_slice).unwrap_or(&[]);
        let mut ax = Vec::new();
        let mut ay = Vec::new();
        let mut sx = Vec::new();
        let mut sy = Vec::new();
        for (region, s) in active {
            let Some(pop) = population.get(*region).copied().filter(|p| *p > 0) else { continue };
            let loss = damage.get(*region).copied().unwrap_or(0.0) / pop as f64;
            if let Some(a) = normalized_activity(s, normalization, true) {
                ax.push(a);
                ay.push(loss);
            }
            if let Some(v) = s.mean_sentiment {
                sx.push(v);
                sy.push(loss);
            }
        }
        bins.push(SeriesBin {
            bin,
            bin_start: span.start_of(bin),
            active_regions: active.len(),
            messages: active.iter().map(|(_, s)| s.n_messages).sum(),
            activity: correlate_all(&ax, &ay, active.len())?,
            sentiment: correlate_all(&sx, &sy, active.len())?,
        });
    }
    Ok(CorrelationSeries { normalization, bins })
}
