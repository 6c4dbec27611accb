use std::collections::{BTreeSet, HashSet};
use std::io::{Read, Write};

use chrono::{DateTime, SecondsFormat, Utc};

use crate::GeoPoint;

use super::{column, csv_reader, line_of, optional_column, Gazetteer, IngestError, Parsed, Position};

pub const MESSAGE_COLUMNS: [&str; 9] = [
    "message_id",
    "user_id",
    "timestamp",
    "lat",
    "lon",
    "keywords",
    "is_retweet",
    "retweeted_count",
    "sentiment",
];

const PROFILE_COLUMN: &str = "profile_location";

#[derive(Debug, Clone, PartialEq)]
pub struct MessageRecord {
    pub message_id: String,
    pub user_id: String,
    pub timestamp: DateTime<Utc>,
    pub location: Option<GeoPoint>,
    pub keywords: BTreeSet<String>,
    pub is_retweet: bool,
    /// Times this message was rebroadcast.
    pub retweeted_count: u64,
    pub sentiment: Option<f64>,
    /// Free-text profile address, used only when `location` is missing.
    pub profile_location: Option<String>,
}

impl MessageRecord {
    pub fn has_keyword(&self, keyword: &str) -> bool {
        self.keywords.contains(keyword)
    }

    pub fn matches_any<'a>(&self, keywords: impl IntoIterator<Item = &'a String>) -> bool {
        keywords.into_iter().any(|k| self.keywords.contains(k))
    }
}

struct Columns {
    id: usize,
    user: usize,
    ts: usize,
    lat: usize,
    lon: usize,
    keywords: usize,
    retweet: usize,
    count: usize,
    sentiment: usize,
    profile: Option<usize>,
}

pub(crate) fn parse_timestamp(s: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| format!("bad timestamp `{s}` (need ISO-8601 with UTC offset): {e}"))
}

pub(crate) fn format_timestamp(t: &DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::AutoSi, true)
}

fn parse_keywords(s: &str) -> BTreeSet<String> {
    s.split(';')
        .map(|k| k.trim().to_lowercase())
        .filter(|k| !k.is_empty())
        .collect()
}

fn parse_row(rec: &csv::StringRecord, cols: &Columns) -> Result<MessageRecord, String> {
    let field = |i: usize| rec.get(i).unwrap_or("");
    let required = |i: usize, name: &str| {
        let v = field(i);
        if v.is_empty() {
            Err(format!("missing {name}"))
        } else {
            Ok(v)
        }
    };
    let message_id = required(cols.id, "message_id")?.to_owned();
    let user_id = required(cols.user, "user_id")?.to_owned();
    let timestamp = parse_timestamp(required(cols.ts, "timestamp")?)?;

    let location = match (field(cols.lat), field(cols.lon)) {
        ("", "") => None,
        ("", _) | (_, "") => return Err("latitude and longitude must both be present or both empty".into()),
        (lat, lon) => {
            let lat: f64 = lat.parse().map_err(|_| format!("bad latitude `{lat}`"))?;
            let lon: f64 = lon.parse().map_err(|_| format!("bad longitude `{lon}`"))?;
            if !(-90.0..=90.0).contains(&lat) {
                return Err("latitude out of range".into());
            }
            if !(-180.0..=180.0).contains(&lon) {
                return Err("longitude out of range".into());
            }
            Some(GeoPoint { lat, lon })
        }
    };

    let keywords = parse_keywords(field(cols.keywords));
    if keywords.is_empty() {
        return Err("no keywords".into());
    }
    let is_retweet = match field(cols.retweet) {
        "0" => false,
        "1" => true,
        other => return Err(format!("is_retweet must be 0 or 1, got `{other}`")),
    };
    let retweeted_count = {
        let v = required(cols.count, "retweeted_count")?;
        v.parse::<u64>().map_err(|_| format!("bad retweeted_count `{v}`"))?
    };
    let sentiment = match field(cols.sentiment) {
        "" => None,
        s => {
            let v: f64 = s.parse().map_err(|_| format!("bad sentiment `{s}`"))?;
            if !(-1.0..=1.0).contains(&v) {
                return Err("sentiment out of range".into());
            }
            Some(v)
        }
    };
    let profile_location = cols
        .profile
        .map(field)
        .filter(|s| !s.is_empty())
        .map(str::to_owned);

    Ok(MessageRecord {
        message_id,
        user_id,
        timestamp,
        location,
        keywords,
        is_retweet,
        retweeted_count,
        sentiment,
        profile_location,
    })
}

/// Parses `messages.csv`, keeping rows whose keyword set intersects
/// `keyword_filter` (every valid row when the filter is empty).
pub fn parse_messages<R: Read>(source: R, keyword_filter: &BTreeSet<String>) -> Result<Parsed<MessageRecord>, IngestError> {
    let filter: BTreeSet<String> = keyword_filter.iter().map(|k| k.trim().to_lowercase()).collect();
    let mut reader = csv_reader(source);
    let headers = reader.headers()?.clone();
    let cols = Columns {
        id: column(&headers, "message_id")?,
        user: column(&headers, "user_id")?,
        ts: column(&headers, "timestamp")?,
        lat: column(&headers, "lat")?,
        lon: column(&headers, "lon")?,
        keywords: column(&headers, "keywords")?,
        retweet: column(&headers, "is_retweet")?,
        count: column(&headers, "retweeted_count")?,
        sentiment: column(&headers, "sentiment")?,
        profile: optional_column(&headers, PROFILE_COLUMN),
    };

    let mut out = Parsed::default();
    let mut seen = HashSet::new();
    let mut rec = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut rec) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) if matches!(e.kind(), csv::ErrorKind::Utf8 { .. }) => {
                out.rows += 1;
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                out.reject(Position::Line(line), "invalid UTF-8");
                continue;
            }
            Err(e) => return Err(e.into()),
        }
        out.rows += 1;
        let line = line_of(&rec);
        match parse_row(&rec, &cols) {
            Err(msg) => out.reject(Position::Line(line), msg),
            Ok(m) if !seen.insert(m.message_id.clone()) => {
                out.reject(Position::Line(line), format!("duplicate message_id `{}`", m.message_id))
            }
            Ok(m) if !filter.is_empty() && m.keywords.is_disjoint(&filter) => out.filtered_out += 1,
            Ok(m) => out.records.push(m),
        }
    }
    Ok(out)
}

/// Writes records in the `messages.csv` schema. The `profile_location`
/// column is appended only when some record carries one.
pub fn write_messages<W: Write>(sink: W, records: &[MessageRecord]) -> Result<(), IngestError> {
    let with_profile = records.iter().any(|m| m.profile_location.is_some());
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    let mut header: Vec<&str> = MESSAGE_COLUMNS.to_vec();
    if with_profile {
        header.push(PROFILE_COLUMN);
    }
    w.write_record(&header)?;
    for m in records {
        let (lat, lon) = m
            .location
            .map(|p| (p.lat.to_string(), p.lon.to_string()))
            .unwrap_or_default();
        let mut row = vec![
            m.message_id.clone(),
            m.user_id.clone(),
            format_timestamp(&m.timestamp),
            lat,
            lon,
            m.keywords.iter().cloned().collect::<Vec<_>>().join(";"),
            if m.is_retweet { "1" } else { "0" }.to_owned(),
            m.retweeted_count.to_string(),
            m.sentiment.map(|s| s.to_string()).unwrap_or_default(),
        ];
        if with_profile {
            row.push(m.profile_location.clone().unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Fills missing locations from the gazetteer using each record's profile
/// address. Returns how many records were geocoded.
pub fn geocode_missing(records: &mut [MessageRecord], gazetteer: &Gazetteer) -> usize {
    let mut filled = 0;
    for m in records.iter_mut().filter(|m| m.location.is_none()) {
        if let Some(p) = m.profile_location.as_deref().and_then(|s| super::gazetteer_geocode(s, gazetteer)) {
            m.location = Some(p);
            filled += 1;
        }
    }
    filled
}
