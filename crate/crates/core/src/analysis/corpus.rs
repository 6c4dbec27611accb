use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;

use crate::geo::{point_to_track_km, GeoError};
use crate::ingest::{CountyRow, PopulationTable};
use crate::metrics::{bin_index, bin_window, compute_activity_summary, ActivitySummary, TimeWindow};
use crate::{GeoPoint, MessageRecord, RegionBoundary, SpatialIndex};

use super::{DamageBasis, DamageByBasis, KeywordScope};

/// Region position for every message; `None` for messages without a
/// location or outside all regions.
pub fn assign_messages(messages: &[MessageRecord], regions: &[RegionBoundary], index: &SpatialIndex) -> Vec<Option<usize>> {
    messages
        .par_iter()
        .map(|m| m.location.and_then(|p| index.locate(p, regions)))
        .collect()
}

/// Messages grouped by region, with the per-region denominators needed to
/// build summaries.
#[derive(Debug, Clone)]
pub struct Corpus<'a> {
    by_region: BTreeMap<String, Vec<&'a MessageRecord>>,
    period_users: BTreeMap<String, u64>,
    population: BTreeMap<String, u64>,
    unassigned: usize,
}

impl<'a> Corpus<'a> {
    /// `assignment[i]` is the position in `regions` of `messages[i]`'s region.
    /// Every region appears in the corpus, with or without messages.
    /// Period users are counted over messages inside `period`.
    pub fn new(
        messages: &'a [MessageRecord],
        regions: &[RegionBoundary],
        assignment: &[Option<usize>],
        period: TimeWindow,
        population: &PopulationTable,
    ) -> Self {
        let mut by_region: BTreeMap<String, Vec<&MessageRecord>> =
            regions.iter().map(|r| (r.region_id.clone(), Vec::new())).collect();
        let mut unassigned = 0;
        for (m, a) in messages.iter().zip(assignment) {
            match a {
                Some(i) => by_region.get_mut(&regions[*i].region_id).expect("region listed").push(m),
                None => unassigned += 1,
            }
        }
        let period_users = by_region
            .iter()
            .map(|(id, msgs)| {
                let users: BTreeSet<&str> = msgs
                    .iter()
                    .filter(|m| period.contains(m.timestamp))
                    .map(|m| m.user_id.as_str())
                    .collect();
                (id.clone(), users.len() as u64)
            })
            .collect();
        let population = by_region
            .keys()
            .filter_map(|id| population.get(id).map(|p| (id.clone(), *p)))
            .collect();
        Self { by_region, period_users, population, unassigned }
    }

    /// Builds the index, joins and groups in one step.
    pub fn join(
        messages: &'a [MessageRecord],
        regions: &[RegionBoundary],
        cell_size: f64,
        period: TimeWindow,
        population: &PopulationTable,
    ) -> Result<Self, GeoError> {
        let index = SpatialIndex::build(regions, cell_size)?;
        let assignment = assign_messages(messages, regions, &index);
        Ok(Self::new(messages, regions, &assignment, period, population))
    }

    pub fn region_ids(&self) -> impl Iterator<Item = &str> {
        self.by_region.keys().map(String::as_str)
    }

    pub fn messages(&self, region_id: &str) -> &[&'a MessageRecord] {
        self.by_region.get(region_id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Messages with a location that fell outside every region, plus those
    /// without a location.
    pub fn unassigned(&self) -> usize {
        self.unassigned
    }

    pub fn keywords(&self) -> BTreeSet<String> {
        self.by_region
            .values()
            .flatten()
            .flat_map(|m| m.keywords.iter().cloned())
            .collect()
    }

    pub fn population(&self) -> &BTreeMap<String, u64> {
        &self.population
    }

    pub fn summary(&self, region_id: &str, window: TimeWindow, scope: &KeywordScope) -> ActivitySummary {
        compute_activity_summary(
            self.messages(region_id).iter().copied().filter(|m| scope.matches(m)),
            region_id,
            window,
            self.period_users.get(region_id).copied().unwrap_or(0),
            self.population.get(region_id).copied(),
        )
    }

    /// One summary per region over `window`.
    pub fn summaries(&self, window: TimeWindow, scope: &KeywordScope) -> BTreeMap<String, ActivitySummary> {
        self.by_region
            .keys()
            .map(|id| (id.clone(), self.summary(id, window, scope)))
            .collect()
    }

    /// Summaries keyed by `(region, keyword)` for each keyword.
    pub fn keyword_summaries<'k>(
        &self,
        window: TimeWindow,
        keywords: impl IntoIterator<Item = &'k str>,
    ) -> BTreeMap<(String, String), ActivitySummary> {
        let mut out = BTreeMap::new();
        for k in keywords {
            let scope = KeywordScope::keyword(k);
            for id in self.by_region.keys() {
                out.insert((id.clone(), k.to_owned()), self.summary(id, window, &scope));
            }
        }
        out
    }

    /// Summaries per region and bin for every bin in `bins`.
    pub fn binned(
        &self,
        epoch: DateTime<Utc>,
        width: Duration,
        bins: std::ops::RangeInclusive<i64>,
        scope: &KeywordScope,
    ) -> BTreeMap<(String, i64), ActivitySummary> {
        let mut out = BTreeMap::new();
        for (id, msgs) in &self.by_region {
            let mut grouped: BTreeMap<i64, Vec<&MessageRecord>> = BTreeMap::new();
            for m in msgs.iter().filter(|m| scope.matches(m)) {
                let k = bin_index(m.timestamp, epoch, width);
                if bins.contains(&k) {
                    grouped.entry(k).or_default().push(m);
                }
            }
            for k in bins.clone() {
                let window = bin_window(k, epoch, width);
                let members = grouped.get(&k).map(Vec::as_slice).unwrap_or(&[]);
                let s = compute_activity_summary(
                    members.iter().copied(),
                    id,
                    window,
                    self.period_users.get(id).copied().unwrap_or(0),
                    self.population.get(id).copied(),
                );
                out.insert((id.clone(), k), s);
            }
        }
        out
    }
}

/// Distance from each region's representative point to the track polyline.
pub fn distances_to_track(regions: &[RegionBoundary], track: &[GeoPoint]) -> Result<BTreeMap<String, f64>, GeoError> {
    regions
        .iter()
        .map(|r| point_to_track_km(r.centroid(), track).map(|d| (r.region_id.clone(), d)))
        .collect()
}

/// Regions whose representative point lies east of 90°W.
pub fn default_city_subset(regions: &[RegionBoundary]) -> Vec<String> {
    let mut ids: Vec<String> = regions
        .iter()
        .filter(|r| r.centroid().lon > -90.0)
        .map(|r| r.region_id.clone())
        .collect();
    ids.sort();
    ids
}

/// Full-period county summaries from the embedded county table. The table
/// has no retweet split, so every tweet counts as original.
pub fn fixture_summaries(rows: &[CountyRow], window: TimeWindow) -> BTreeMap<String, ActivitySummary> {
    rows.iter()
        .map(|r| {
            let mut s = ActivitySummary::empty(r.county.clone(), window, r.users, Some(r.population));
            s.n_messages = r.tweets;
            s.n_original = r.tweets;
            s.active_users_window = r.users;
            (r.county.clone(), s)
        })
        .collect()
}

/// Ex-post and modeled damage from the county table, in USD.
pub fn fixture_damage(rows: &[CountyRow]) -> DamageByBasis {
    let mut out = DamageByBasis::new();
    for r in rows {
        out.entry(DamageBasis::ExPost)
            .or_default()
            .insert(r.county.clone(), r.ex_post_damage_musd * 1e6);
        out.entry(DamageBasis::Hazus)
            .or_default()
            .insert(r.county.clone(), r.hazus_damage_musd * 1e6);
    }
    out
}
