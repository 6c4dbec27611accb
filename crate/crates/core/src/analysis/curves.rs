use std::collections::{BTreeMap, BTreeSet};

use crate::metrics::{local_popularity, normalized_activity, retweet_fraction, ActivitySummary};
use crate::Normalization;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub city: String,
    pub distance_km: f64,
    /// Messages per period user.
    pub activity: f64,
    pub retweet_fraction: Option<f64>,
    pub popularity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceCurve {
    pub keyword: String,
    /// Sorted by distance, then city.
    pub points: Vec<CurvePoint>,
    /// Cities dropped because they have no period users.
    pub omitted: Vec<String>,
}

/// One raw point per city for `keyword`. Summaries are keyed by
/// `(city, keyword)`; cities without a distance are skipped.
pub fn activity_distance_curve(
    summaries: &BTreeMap<(String, String), ActivitySummary>,
    distances_km: &BTreeMap<String, f64>,
    keyword: &str,
) -> DistanceCurve {
    let mut points = Vec::new();
    let mut omitted = Vec::new();
    for ((city, k), s) in summaries {
        if k != keyword {
            continue;
        }
        let Some(&distance_km) = distances_km.get(city) else { continue };
        match normalized_activity(s, Normalization::PerPeriodUser, false) {
            Some(activity) => points.push(CurvePoint {
                city: city.clone(),
                distance_km,
                activity,
                retweet_fraction: retweet_fraction(s),
                popularity: local_popularity(s),
            }),
            None => omitted.push(city.clone()),
        }
    }
    points.sort_by(|a, b| a.distance_km.total_cmp(&b.distance_km).then_with(|| a.city.cmp(&b.city)));
    DistanceCurve { keyword: keyword.to_owned(), points, omitted }
}

/// City x keyword x bin matrix of per-user daily activity.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    /// Nearest first.
    pub cities: Vec<String>,
    /// Most messages first.
    pub keywords: Vec<String>,
    pub bins: Vec<i64>,
    values: Vec<f64>,
}

impl Heatmap {
    pub fn get(&self, city: usize, keyword: usize, bin: usize) -> f64 {
        self.values[(city * self.keywords.len() + keyword) * self.bins.len() + bin]
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.cities.len(), self.keywords.len(), self.bins.len())
    }
}

/// Builds the heatmap from daily summaries keyed by `(city, keyword, bin)`.
/// Cells without a summary or without period users are 0.
pub fn heatmap_matrix(
    daily: &BTreeMap<(String, String, i64), ActivitySummary>,
    distances_km: &BTreeMap<String, f64>,
    keywords: &[String],
    bins: std::ops::RangeInclusive<i64>,
) -> Heatmap {
    let present: BTreeSet<&str> = daily.keys().map(|(c, _, _)| c.as_str()).collect();
    let mut cities: Vec<(f64, &str)> = distances_km
        .iter()
        .filter(|(c, _)| present.contains(c.as_str()))
        .map(|(c, d)| (*d, c.as_str()))
        .collect();
    cities.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1)));

    let mut totals: BTreeMap<&str, u64> = keywords.iter().map(|k| (k.as_str(), 0)).collect();
    for ((_, k, b), s) in daily {
        if let Some(t) = totals.get_mut(k.as_str()) {
            if bins.contains(b) {
                *t += s.n_messages;
            }
        }
    }
    let mut kw: Vec<(&str, u64)> = totals.into_iter().collect();
    kw.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    let bins: Vec<i64> = bins.collect();
    let mut values = Vec::with_capacity(cities.len() * kw.len() * bins.len());
    let mut key = (String::new(), String::new(), 0);
    for (_, city) in &cities {
        for (k, _) in &kw {
            for b in &bins {
                key.0.clear();
                key.0.push_str(city);
                key.1.clear();
                key.1.push_str(k);
                key.2 = *b;
                let v = daily
                    .get(&key)
                    .and_then(|s| normalized_activity(s, Normalization::PerPeriodUser, false))
                    .unwrap_or(0.0);
                values.push(v);
            }
        }
    }
    Heatmap {
        cities: cities.into_iter().map(|(_, c)| c.to_owned()).collect(),
        keywords: kw.into_iter().map(|(k, _)| k.to_owned()).collect(),
        bins,
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TimeWindow;

    fn summary(city: &str, messages: u64, retweets: u64, users: u64) -> ActivitySummary {
        let w: TimeWindow = "2012-10-20..2012-11-12".parse().unwrap();
        let mut s = ActivitySummary::empty(city, w, users, None);
        s.n_messages = messages;
        s.n_retweets = retweets;
        s.n_original = messages - retweets;
        s
    }

    #[test]
    fn curve_sorted_and_omits_userless() {
        let mut sums = BTreeMap::new();
        for (c, n, u) in [("far", 10, 100), ("mid", 40, 100), ("near", 90, 100), ("empty", 0, 0)] {
            sums.insert((c.to_owned(), "sandy".to_owned()), summary(c, n, 0, u));
        }
        sums.insert(("near".to_owned(), "gas".to_owned()), summary("near", 5, 0, 100));
        let d: BTreeMap<String, f64> =
            [("near", 100.0), ("mid", 500.0), ("far", 2000.0), ("empty", 50.0)].map(|(c, d)| (c.to_owned(), d)).into();
        let curve = activity_distance_curve(&sums, &d, "sandy");
        let got: Vec<(f64, f64)> = curve.points.iter().map(|p| (p.distance_km, p.activity)).collect();
        assert_eq!(got, vec![(100.0, 0.9), (500.0, 0.4), (2000.0, 0.1)]);
        assert_eq!(curve.omitted, vec!["empty"]);
    }

    #[test]
    fn heatmap_orderings() {
        let mut daily = BTreeMap::new();
        for (c, k, b, n) in [("b", "storm", 0, 3), ("a", "storm", 1, 4), ("a", "sandy", 0, 100), ("b", "sandy", 1, 0)] {
            daily.insert((c.to_owned(), k.to_owned(), b), summary(c, n, 0, 10));
        }
        let d: BTreeMap<String, f64> = [("a".to_owned(), 900.0), ("b".to_owned(), 10.0)].into();
        let h = heatmap_matrix(&daily, &d, &["storm".to_owned(), "sandy".to_owned()], 0..=1);
        assert_eq!(h.shape(), (2, 2, 2));
        assert_eq!(h.cities, vec!["b", "a"]);
        assert_eq!(h.keywords, vec!["sandy", "storm"]);
        assert_eq!(h.get(1, 0, 0), 10.0);
        assert_eq!(h.get(0, 1, 0), 0.3);
        assert_eq!(h.get(0, 1, 1), 0.0);
    }
}
