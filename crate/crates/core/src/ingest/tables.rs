use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use chrono::{DateTime, Utc};

use crate::GeoPoint;

use super::messages::{format_timestamp, parse_timestamp};
use super::{column, csv_reader, line_of, IngestError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackPoint {
    pub timestamp: DateTime<Utc>,
    pub lat: f64,
    pub lon: f64,
}

impl TrackPoint {
    pub fn point(&self) -> GeoPoint {
        GeoPoint { lat: self.lat, lon: self.lon }
    }
}

pub fn track_polyline(track: &[TrackPoint]) -> Vec<GeoPoint> {
    track.iter().map(TrackPoint::point).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationEntry {
    pub region_id: String,
    pub population: u64,
}

/// Census population by region id.
pub type PopulationTable = BTreeMap<String, u64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DamageSource {
    FemaIa,
    Insurance,
    Hazus,
}

impl DamageSource {
    pub const ALL: [DamageSource; 3] = [DamageSource::FemaIa, DamageSource::Insurance, DamageSource::Hazus];

    pub fn as_str(self) -> &'static str {
        match self {
            DamageSource::FemaIa => "fema_ia",
            DamageSource::Insurance => "insurance",
            DamageSource::Hazus => "hazus",
        }
    }
}

impl fmt::Display for DamageSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DamageSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fema_ia" => Ok(DamageSource::FemaIa),
            "insurance" => Ok(DamageSource::Insurance),
            "hazus" => Ok(DamageSource::Hazus),
            other => Err(format!("unknown damage source `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DamageRecord {
    pub region_id: String,
    pub amount_usd: f64,
    pub source: DamageSource,
}

/// Damage totals per region and source; repeated rows are summed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DamageTable {
    totals: BTreeMap<String, BTreeMap<DamageSource, f64>>,
}

impl DamageTable {
    pub fn add(&mut self, record: &DamageRecord) {
        *self
            .totals
            .entry(record.region_id.clone())
            .or_default()
            .entry(record.source)
            .or_insert(0.0) += record.amount_usd;
    }

    pub fn total(&self, region_id: &str, source: DamageSource) -> f64 {
        self.totals
            .get(region_id)
            .and_then(|m| m.get(&source))
            .copied()
            .unwrap_or(0.0)
    }

    /// Sum over `sources` for one region; `None` when the region has no
    /// record for any of them.
    pub fn sum(&self, region_id: &str, sources: &[DamageSource]) -> Option<f64> {
        let by_source = self.totals.get(region_id)?;
        let mut any = false;
        let mut total = 0.0;
        for s in sources {
            if let Some(v) = by_source.get(s) {
                any = true;
                total += v;
            }
        }
        any.then_some(total)
    }

    pub fn regions(&self) -> impl Iterator<Item = &str> {
        self.totals.keys().map(String::as_str)
    }

    pub fn records(&self) -> impl Iterator<Item = DamageRecord> + '_ {
        self.totals.iter().flat_map(|(id, m)| {
            m.iter().map(move |(s, v)| DamageRecord { region_id: id.clone(), amount_usd: *v, source: *s })
        })
    }

    /// Multiplies every amount by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.totals.values_mut().flat_map(|m| m.values_mut()) {
            *v *= factor;
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.totals.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    Population,
    Damage,
}

#[derive(Debug, Clone, PartialEq)]
pub enum KeyedTable {
    Population(PopulationTable),
    Damage(DamageTable),
}

fn row_error(line: u64, message: impl Into<String>) -> IngestError {
    IngestError::Row { line, message: message.into() }
}

/// Parses `track.csv`; timestamps must be strictly increasing.
pub fn parse_track<R: Read>(source: R) -> Result<Vec<TrackPoint>, IngestError> {
    let mut reader = csv_reader(source);
    let headers = reader.headers()?.clone();
    let (ts, lat, lon) = (column(&headers, "timestamp")?, column(&headers, "lat")?, column(&headers, "lon")?);
    let mut out: Vec<TrackPoint> = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let timestamp = parse_timestamp(field(ts)).map_err(|e| row_error(line, e))?;
        let p = (field(lat).parse::<f64>(), field(lon).parse::<f64>());
        let (Ok(la), Ok(lo)) = p else {
            return Err(row_error(line, "bad coordinates"));
        };
        GeoPoint::new(la, lo).map_err(|e| row_error(line, e.to_string()))?;
        if out.last().is_some_and(|prev| prev.timestamp >= timestamp) {
            return Err(IngestError::NonMonotoneTrack { line });
        }
        out.push(TrackPoint { timestamp, lat: la, lon: lo });
    }
    Ok(out)
}

pub fn parse_population<R: Read>(source: R) -> Result<PopulationTable, IngestError> {
    let mut reader = csv_reader(source);
    let headers = reader.headers()?.clone();
    let (id, pop) = (column(&headers, "region_id")?, column(&headers, "population")?);
    let mut out = PopulationTable::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let region_id = rec.get(id).unwrap_or("");
        if region_id.is_empty() {
            return Err(row_error(line, "missing region_id"));
        }
        let raw = rec.get(pop).unwrap_or("");
        let population: u64 = raw
            .parse()
            .ok()
            .filter(|&p| p > 0)
            .ok_or_else(|| row_error(line, format!("population must be a positive integer, got `{raw}`")))?;
        if out.insert(region_id.to_owned(), population).is_some() {
            return Err(IngestError::DuplicateKey { line, region_id: region_id.to_owned() });
        }
    }
    Ok(out)
}

pub fn parse_damage<R: Read>(source: R) -> Result<DamageTable, IngestError> {
    let mut reader = csv_reader(source);
    let headers = reader.headers()?.clone();
    let (id, amount, source_col) = (
        column(&headers, "region_id")?,
        column(&headers, "amount_usd")?,
        column(&headers, "source")?,
    );
    let mut out = DamageTable::default();
    for rec in reader.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let region_id = rec.get(id).unwrap_or("");
        if region_id.is_empty() {
            return Err(row_error(line, "missing region_id"));
        }
        let raw = rec.get(amount).unwrap_or("");
        let amount_usd: f64 = raw
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite() && *v >= 0.0)
            .ok_or_else(|| row_error(line, format!("amount_usd must be a non-negative number, got `{raw}`")))?;
        let source: DamageSource = rec.get(source_col).unwrap_or("").parse().map_err(|e: String| row_error(line, e))?;
        out.add(&DamageRecord { region_id: region_id.to_owned(), amount_usd, source });
    }
    Ok(out)
}

pub fn parse_keyed_table<R: Read>(source: R, kind: TableKind) -> Result<KeyedTable, IngestError> {
    match kind {
        TableKind::Population => parse_population(source).map(KeyedTable::Population),
        TableKind::Damage => parse_damage(source).map(KeyedTable::Damage),
    }
}

fn lf_writer<W: Write>(sink: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink)
}

pub fn write_population<W: Write>(sink: W, table: &PopulationTable) -> Result<(), IngestError> {
    let mut w = lf_writer(sink);
    w.write_record(["region_id", "population"])?;
    for (id, p) in table {
        w.write_record([id.as_str(), &p.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_damage<W: Write>(sink: W, table: &DamageTable) -> Result<(), IngestError> {
    let mut w = lf_writer(sink);
    w.write_record(["region_id", "amount_usd", "source"])?;
    for r in table.records() {
        w.write_record([r.region_id.as_str(), &r.amount_usd.to_string(), r.source.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_track<W: Write>(sink: W, track: &[TrackPoint]) -> Result<(), IngestError> {
    let mut w = lf_writer(sink);
    w.write_record(["timestamp", "lat", "lon"])?;
    for p in track {
        w.write_record([format_timestamp(&p.timestamp), p.lat.to_string(), p.lon.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_track() {
        let t = parse_track("timestamp,lat,lon\n2012-10-29T00:00:00Z,35,-72\n2012-10-30T00:00:00Z,39.4,-74.4\n".as_bytes())
            .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(track_polyline(&t).windows(2).count(), 1);
    }

    #[test]
    fn non_monotone_track_is_fatal() {
        let src = "timestamp,lat,lon\n2012-10-30T00:00:00Z,35,-72\n2012-10-29T00:00:00Z,39,-74\n";
        assert!(matches!(parse_track(src.as_bytes()), Err(IngestError::NonMonotoneTrack { line: 3 })));
        let dup = "timestamp,lat,lon\n2012-10-30T00:00:00Z,35,-72\n2012-10-30T00:00:00Z,39,-74\n";
        assert!(matches!(parse_track(dup.as_bytes()), Err(IngestError::NonMonotoneTrack { .. })));
    }

    #[test]
    fn damage_sums_per_source() {
        let src = "region_id,amount_usd,source\nr1,10,fema_ia\nr1,5,fema_ia\nr1,7,hazus\n";
        let t = parse_damage(src.as_bytes()).unwrap();
        assert_eq!(t.total("r1", DamageSource::FemaIa), 15.0);
        assert_eq!(t.total("r1", DamageSource::Hazus), 7.0);
        assert_eq!(t.sum("r1", &[DamageSource::FemaIa, DamageSource::Insurance]), Some(15.0));
        assert_eq!(t.sum("r2", &[DamageSource::FemaIa]), None);
    }

    #[test]
    fn damage_rejects_negative_and_unknown() {
        assert!(parse_damage("region_id,amount_usd,source\nr1,-1,hazus\n".as_bytes()).is_err());
        assert!(parse_damage("region_id,amount_usd,source\nr1,1,other\n".as_bytes()).is_err());
    }

    #[test]
    fn duplicate_population_is_fatal() {
        let err = parse_population("region_id,population\nr1,100\nr1,200\n".as_bytes()).unwrap_err();
        assert!(matches!(err, IngestError::DuplicateKey { line: 3, .. }));
    }

    #[test]
    fn zero_population_rejected() {
        assert!(parse_population("region_id,population\nr1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn keyed_tables_round_trip() {
        let pop: PopulationTable = [("a".to_owned(), 5), ("b".to_owned(), 7)].into_iter().collect();
        let mut buf = Vec::new();
        write_population(&mut buf, &pop).unwrap();
        assert_eq!(parse_keyed_table(buf.as_slice(), TableKind::Population).unwrap(), KeyedTable::Population(pop));

        let dmg = parse_damage("region_id,amount_usd,source\nr1,0.1,insurance\nr2,3,hazus\n".as_bytes()).unwrap();
        let mut buf = Vec::new();
        write_damage(&mut buf, &dmg).unwrap();
        assert_eq!(parse_keyed_table(buf.as_slice(), TableKind::Damage).unwrap(), KeyedTable::Damage(dmg));
    }
}
