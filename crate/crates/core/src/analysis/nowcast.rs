use std::collections::BTreeMap;
use std::fmt;

use crate::metrics::{normalized_activity, ActivitySummary};
use crate::{Normalization, TimeWindow};

use super::KeywordScope;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExclusionReason {
    Inactive,
    ZeroDenominator,
}

impl fmt::Display for ExclusionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExclusionReason::Inactive => "inactive",
            ExclusionReason::ZeroDenominator => "zero_denominator",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub region_id: String,
    pub reason: ExclusionReason,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NowcastEntry {
    /// 1-based.
    pub rank: usize,
    pub region_id: String,
    pub per_capita_activity: f64,
    pub n_original: u64,
    pub n_messages: u64,
    pub population: Option<u64>,
    /// Rank of the region's per-capita damage among ranked regions, when
    /// damage is supplied.
    pub damage_rank: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NowcastReport {
    pub window: TimeWindow,
    pub normalization: Normalization,
    pub keywords: KeywordScope,
    pub entries: Vec<NowcastEntry>,
    /// Sorted by region id.
    pub excluded: Vec<Exclusion>,
    pub diagnostics: Vec<String>,
}

/// Ranks regions by normalized original-message activity, highest first,
/// ties by region id.
pub fn nowcast(
    summaries: &BTreeMap<String, ActivitySummary>,
    window: TimeWindow,
    normalization: Normalization,
    keywords: KeywordScope,
    damage: Option<&BTreeMap<String, f64>>,
) -> NowcastReport {
    let mut ranked = Vec::new();
    let mut excluded = Vec::new();
    for (region, s) in summaries {
        if !s.is_active() {
            excluded.push(Exclusion { region_id: region.clone(), reason: ExclusionReason::Inactive });
            continue;
        }
        match normalized_activity(s, normalization, true) {
            Some(a) => ranked.push((a, s)),
            None => excluded.push(Exclusion { region_id: region.clone(), reason: ExclusionReason::ZeroDenominator }),
        }
    }
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.region_id.cmp(&b.1.region_id)));

    let damage_ranks: BTreeMap<&str, usize> = match damage {
        Some(d) => {
            let mut pc: Vec<(f64, &str)> = ranked
                .iter()
                .filter_map(|(_, s)| {
                    let pop = s.population.filter(|p| *p > 0)? as f64;
                    Some((d.get(&s.region_id).copied().unwrap_or(0.0) / pop, s.region_id.as_str()))
                })
                .collect();
            pc.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            pc.into_iter().enumerate().map(|(i, (_, r))| (r, i + 1)).collect()
        }
        None => BTreeMap::new(),
    };

    let entries: Vec<NowcastEntry> = ranked
        .iter()
        .enumerate()
        .map(|(i, (a, s))| NowcastEntry {
            rank: i + 1,
            region_id: s.region_id.clone(),
            per_capita_activity: *a,
            n_original: s.n_original,
            n_messages: s.n_messages,
            population: s.population,
            damage_rank: damage_ranks.get(s.region_id.as_str()).copied(),
        })
        .collect();
    let mut diagnostics = Vec::new();
    if entries.is_empty() {
        diagnostics.push(format!("no active region with a positive denominator in {window}"));
    }
    NowcastReport { window, normalization, keywords, entries, excluded, diagnostics }
}
