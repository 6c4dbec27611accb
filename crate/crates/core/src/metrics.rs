//! Time binning and per-region activity summaries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Duration, NaiveDate, TimeZone, Utc};

use crate::MessageRecord;

/// Half-open interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TimeWindow {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl TimeWindow {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self, String> {
        if start < end {
            Ok(Self { start, end })
        } else {
            Err(format!("window start {start} must precede end {end}"))
        }
    }

    /// Whole UTC days `first..=last`.
    pub fn days(first: NaiveDate, last: NaiveDate) -> Result<Self, String> {
        let start = Utc.from_utc_datetime(&first.and_hms_opt(0, 0, 0).expect("midnight"));
        let end = Utc.from_utc_datetime(&last.and_hms_opt(0, 0, 0).expect("midnight")) + Duration::days(1);
        Self::new(start, end)
    }

    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.start <= t && t < self.end
    }

    pub fn duration(&self) -> Duration {
        self.end - self.start
    }
}

impl fmt::Display for TimeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start.format("%Y-%m-%dT%H:%M:%SZ"), self.end.format("%Y-%m-%dT%H:%M:%SZ"))
    }
}

impl serde::Serialize for TimeWindow {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for TimeWindow {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `A..B`. Bare dates are whole days with `B` inclusive
/// (`2012-10-31..2012-11-12` ends at 2012-11-13T00:00Z); RFC 3339
/// instants are taken literally with `B` exclusive.
impl FromStr for TimeWindow {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("window `{s}` must look like A..B"))?;
        let (a, b) = (a.trim(), b.trim());
        if let (Ok(da), Ok(db)) = (NaiveDate::from_str(a), NaiveDate::from_str(b)) {
            return Self::days(da, db);
        }
        let parse = |x: &str| {
            DateTime::parse_from_rfc3339(x)
                .map(|t| t.with_timezone(&Utc))
                .map_err(|e| format!("bad instant `{x}`: {e}"))
        };
        Self::new(parse(a)?, parse(b)?)
    }
}

fn nanos(d: Duration) -> i128 {
    let secs = d.num_seconds();
    let rest = (d - Duration::seconds(secs)).num_nanoseconds().unwrap_or(0);
    secs as i128 * 1_000_000_000 + rest as i128
}

/// Bin `k` covers `[epoch + k*width, epoch + (k+1)*width)`.
pub fn bin_index(t: DateTime<Utc>, epoch: DateTime<Utc>, width: Duration) -> i64 {
    let w = nanos(width);
    assert!(w > 0, "bin width must be positive");
    nanos(t - epoch).div_euclid(w) as i64
}

pub fn bin_offsets(timestamps: &[DateTime<Utc>], epoch: DateTime<Utc>, width: Duration) -> Vec<i64> {
    timestamps.iter().map(|&t| bin_index(t, epoch, width)).collect()
}

pub fn bin_window(k: i64, epoch: DateTime<Utc>, width: Duration) -> TimeWindow {
    let start = epoch + width * k as i32;
    TimeWindow { start, end: start + width }
}

/// Default reference instant for bin offsets: 2012-10-30T00:00Z.
pub fn default_epoch() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2012, 10, 30, 0, 0, 0).single().expect("valid epoch")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivitySummary {
    pub region_id: String,
    pub window: TimeWindow,
    pub n_messages: u64,
    pub n_original: u64,
    pub n_retweets: u64,
    /// Local originals rebroadcast at least once; each counts once.
    pub n_popular: u64,
    pub active_users_window: u64,
    pub active_users_period: u64,
    pub mean_sentiment: Option<f64>,
    pub n_scored: u64,
    pub population: Option<u64>,
}

impl ActivitySummary {
    pub fn empty(region_id: impl Into<String>, window: TimeWindow, active_users_period: u64, population: Option<u64>) -> Self {
        Self {
            region_id: region_id.into(),
            window,
            n_messages: 0,
            n_original: 0,
            n_retweets: 0,
            n_popular: 0,
            active_users_window: 0,
            active_users_period,
            mean_sentiment: None,
            n_scored: 0,
            population,
        }
    }

    pub fn is_active(&self) -> bool {
        self.n_messages > 0
    }

    /// Combines summaries of disjoint windows of the same region. Counts
    /// add; the sentiment mean is re-weighted by scored-message counts.
    /// `active_users_window` becomes an upper bound (users may repeat).
    pub fn merge(&self, other: &Self) -> Self {
        let n_scored = self.n_scored + other.n_scored;
        let mean_sentiment = match (self.mean_sentiment, other.mean_sentiment) {
            (Some(a), Some(b)) => Some((a * self.n_scored as f64 + b * other.n_scored as f64) / n_scored as f64),
            (a, b) => a.or(b),
        };
        Self {
            region_id: self.region_id.clone(),
            window: TimeWindow {
                start: self.window.start.min(other.window.start),
                end: self.window.end.max(other.window.end),
            },
            n_messages: self.n_messages + other.n_messages,
            n_original: self.n_original + other.n_original,
            n_retweets: self.n_retweets + other.n_retweets,
            n_popular: self.n_popular + other.n_popular,
            active_users_window: (self.active_users_window + other.active_users_window).min(self.active_users_period),
            active_users_period: self.active_users_period,
            mean_sentiment,
            n_scored,
            population: self.population,
        }
    }
}

/// Summarizes the messages of one region that fall inside `window`.
pub fn compute_activity_summary<'a>(
    messages: impl IntoIterator<Item = &'a MessageRecord>,
    region_id: &str,
    window: TimeWindow,
    period_users: u64,
    population: Option<u64>,
) -> ActivitySummary {
    let mut s = ActivitySummary::empty(region_id, window, period_users, population);
    let mut users = BTreeSet::new();
    let mut scores = Vec::new();
    for m in messages.into_iter().filter(|m| window.contains(m.timestamp)) {
        s.n_messages += 1;
        if m.is_retweet {
            s.n_retweets += 1;
        } else {
            s.n_original += 1;
            if m.retweeted_count >= 1 {
                s.n_popular += 1;
            }
        }
        users.insert(m.user_id.as_str());
        scores.extend(m.sentiment);
    }
    // Sorted so the result does not depend on message order; the running
    // mean keeps a constant series exactly constant.
    scores.sort_by(f64::total_cmp);
    let mut mean = 0.0;
    for v in scores {
        s.n_scored += 1;
        mean += (v - mean) / s.n_scored as f64;
    }
    s.active_users_window = users.len() as u64;
    s.active_users_period = s.active_users_period.max(s.active_users_window);
    s.mean_sentiment = (s.n_scored > 0).then_some(mean);
    s
}

/// Distinct users per region over all messages given.
pub fn period_users<'a>(assigned: impl IntoIterator<Item = (&'a str, &'a MessageRecord)>) -> BTreeMap<String, u64> {
    let mut sets: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (region, m) in assigned {
        sets.entry(region).or_default().insert(&m.user_id);
    }
    sets.into_iter().map(|(r, u)| (r.to_owned(), u.len() as u64)).collect()
}

/// Activity denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Normalization {
    /// Distinct local users over the whole collection period.
    PerPeriodUser,
    /// Census population.
    PerCapita,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::PerPeriodUser => "per_period_user",
            Normalization::PerCapita => "per_capita",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "per_period_user" | "users" => Ok(Normalization::PerPeriodUser),
            "per_capita" | "population" => Ok(Normalization::PerCapita),
            other => Err(format!("unknown normalization `{other}`")),
        }
    }
}

pub fn denominator(s: &ActivitySummary, mode: Normalization) -> Option<u64> {
    match mode {
        Normalization::PerPeriodUser => Some(s.active_users_period),
        Normalization::PerCapita => s.population,
    }
    .filter(|&d| d > 0)
}

pub fn normalized_activity(s: &ActivitySummary, mode: Normalization, original_only: bool) -> Option<f64> {
    let count = if original_only { s.n_original } else { s.n_messages };
    denominator(s, mode).map(|d| count as f64 / d as f64)
}

pub fn retweet_fraction(s: &ActivitySummary) -> Option<f64> {
    (s.n_messages > 0).then(|| s.n_retweets as f64 / s.n_messages as f64)
}

pub fn local_popularity(s: &ActivitySummary) -> Option<f64> {
    (s.active_users_period > 0).then(|| s.n_popular as f64 / s.active_users_period as f64)
}
