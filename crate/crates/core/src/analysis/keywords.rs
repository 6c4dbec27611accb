use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use crate::metrics::{normalized_activity, ActivitySummary};
use crate::stats::correlate;
use crate::{CorrelationResult, Method, Normalization, Transform};

use super::AnalysisError;

/// Keywords active in fewer cities than this are ranked last as degenerate.
pub const MIN_ACTIVE_CITIES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct KeywordRank {
    pub keyword: String,
    pub kendall: CorrelationResult,
    pub spearman: CorrelationResult,
    pub active_cities: usize,
    pub degenerate: bool,
}

/// Keywords from most to least distance-sensitive.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct KeywordRanking {
    pub entries: Vec<KeywordRank>,
}

impl KeywordRanking {
    pub fn keywords(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.keyword.as_str())
    }

    pub fn position(&self, keyword: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.keyword == keyword)
    }
}

fn relevance_order(a: &KeywordRank, b: &KeywordRank) -> Ordering {
    a.degenerate.cmp(&b.degenerate).then_with(|| {
        if a.degenerate {
            return a.keyword.cmp(&b.keyword);
        }
        let (ta, tb) = (a.kendall.coefficient, b.kendall.coefficient);
        tb.abs()
            .total_cmp(&ta.abs())
            .then_with(|| ta.total_cmp(&tb))
            .then_with(|| a.keyword.cmp(&b.keyword))
    })
}

/// Correlates per-user activity with distance for every keyword over the
/// cities in `subset`. `summaries` is keyed by `(city, keyword)`.
pub fn rank_keywords(
    summaries: &BTreeMap<(String, String), ActivitySummary>,
    distances_km: &BTreeMap<String, f64>,
    subset: &[String],
) -> Result<KeywordRanking, AnalysisError> {
    let keywords: BTreeSet<&str> = summaries.keys().map(|(_, k)| k.as_str()).collect();
    let mut entries = Vec::with_capacity(keywords.len());
    for keyword in keywords {
        let mut distance = Vec::new();
        let mut activity = Vec::new();
        let mut active = 0;
        for city in subset {
            let d = *distances_km
                .get(city)
                .ok_or_else(|| AnalysisError::MissingDistance(city.clone()))?;
            let s = summaries
                .get(&(city.clone(), keyword.to_owned()))
                .ok_or_else(|| AnalysisError::MissingSummary { city: city.clone(), keyword: keyword.to_owned() })?;
            if let Some(a) = normalized_activity(s, Normalization::PerPeriodUser, false) {
                distance.push(d);
                activity.push(a);
                active += usize::from(s.is_active());
            }
        }
        let kendall = correlate(&activity, &distance, Method::Kendall, Transform::Raw)?;
        let spearman = correlate(&activity, &distance, Method::Spearman, Transform::Raw)?;
        entries.push(KeywordRank {
            keyword: keyword.to_owned(),
            degenerate: active < MIN_ACTIVE_CITIES || kendall.is_degenerate(),
            kendall,
            spearman,
            active_cities: active,
        });
    }
    entries.sort_by(relevance_order);
    Ok(KeywordRanking { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TimeWindow;

    fn summary(city: &str, messages: u64, users: u64) -> ActivitySummary {
        let w: TimeWindow = "2012-10-20..2012-11-12".parse().unwrap();
        let mut s = ActivitySummary::empty(city, w, users, None);
        s.n_messages = messages;
        s.n_original = messages;
        s
    }

    fn setup(profiles: &[(&str, [u64; 4])]) -> (BTreeMap<(String, String), ActivitySummary>, BTreeMap<String, f64>, Vec<String>) {
        let cities = ["c1", "c2", "c3", "c4"];
        let dist = [100.0, 400.0, 900.0, 2000.0];
        let mut sums = BTreeMap::new();
        for (k, counts) in profiles {
            for (c, n) in cities.iter().zip(counts) {
                sums.insert((c.to_string(), k.to_string()), summary(c, *n, 100));
            }
        }
        let d = cities.iter().zip(dist).map(|(c, d)| (c.to_string(), d)).collect();
        (sums, d, cities.iter().map(|c| c.to_string()).collect())
    }

    #[test]
    fn decayed_before_flat() {
        let (s, d, sub) = setup(&[("flat", [10, 10, 10, 10]), ("hurricane", [90, 40, 10, 1])]);
        let r = rank_keywords(&s, &d, &sub).unwrap();
        assert_eq!(r.keywords().collect::<Vec<_>>(), vec!["hurricane", "flat"]);
        assert_eq!(r.entries[0].kendall.coefficient, -1.0);
        assert!(r.entries[1].degenerate);
    }

    #[test]
    fn ties_alphabetical_and_negative_first() {
        let (s, d, sub) = setup(&[
            ("b", [90, 40, 10, 1]),
            ("a", [90, 40, 10, 1]),
            ("c", [1, 10, 40, 90]),
        ]);
        let r = rank_keywords(&s, &d, &sub).unwrap();
        assert_eq!(r.keywords().collect::<Vec<_>>(), vec!["a", "b", "c"]);
    }

    #[test]
    fn sparse_keyword_last() {
        let (s, d, sub) = setup(&[("rare", [5, 0, 0, 1]), ("weak", [5, 6, 4, 5])]);
        let r = rank_keywords(&s, &d, &sub).unwrap();
        assert_eq!(r.position("rare"), Some(1));
        assert_eq!(r.entries[1].active_cities, 2);
        assert!(r.entries[1].degenerate);
    }

    #[test]
    fn missing_inputs_are_errors() {
        let (s, mut d, sub) = setup(&[("a", [1, 2, 3, 4])]);
        d.remove("c2");
        assert_eq!(rank_keywords(&s, &d, &sub), Err(AnalysisError::MissingDistance("c2".into())));
        let (mut s, d, sub) = setup(&[("a", [1, 2, 3, 4])]);
        s.remove(&("c3".to_owned(), "a".to_owned()));
        assert!(matches!(rank_keywords(&s, &d, &sub), Err(AnalysisError::MissingSummary { .. })));
    }
}
