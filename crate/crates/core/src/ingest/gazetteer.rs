use std::collections::HashMap;
use std::io::Read;

use crate::GeoPoint;

use super::{column, csv_reader, line_of, IngestError};

#[derive(Debug, Clone, PartialEq)]
pub struct GazetteerEntry {
    pub place_name: String,
    pub admin_code: String,
    pub lat: f64,
    pub lon: f64,
}

/// Exact-match place lookup keyed by normalized names.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    by_pair: HashMap<(String, String), GeoPoint>,
    by_place: HashMap<String, Vec<GeoPoint>>,
}

/// Trims, collapses internal whitespace and lowercases.
pub fn normalize_place(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl Gazetteer {
    /// Fails on a duplicate (place, admin) pair; the error carries the
    /// 1-based entry index as its line.
    pub fn from_entries(entries: impl IntoIterator<Item = GazetteerEntry>) -> Result<Self, IngestError> {
        let mut g = Gazetteer::default();
        for (i, e) in entries.into_iter().enumerate() {
            g.insert(e, i as u64 + 1)?;
        }
        Ok(g)
    }

    fn insert(&mut self, e: GazetteerEntry, line: u64) -> Result<(), IngestError> {
        let place = normalize_place(&e.place_name);
        let admin = normalize_place(&e.admin_code);
        let p = GeoPoint { lat: e.lat, lon: e.lon };
        if self.by_pair.insert((place.clone(), admin.clone()), p).is_some() {
            return Err(IngestError::DuplicatePlace { line, place, admin });
        }
        self.by_place.entry(place).or_default().push(p);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.by_pair.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_pair.is_empty()
    }
}

pub fn parse_gazetteer<R: Read>(source: R) -> Result<Gazetteer, IngestError> {
    let mut reader = csv_reader(source);
    let headers = reader.headers()?.clone();
    let cols = [
        column(&headers, "place_name")?,
        column(&headers, "admin_code")?,
        column(&headers, "lat")?,
        column(&headers, "lon")?,
    ];
    let mut g = Gazetteer::default();
    for rec in reader.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let f = |i: usize| rec.get(cols[i]).unwrap_or("");
        let bad = |m: &str| IngestError::Row { line, message: m.to_owned() };
        if f(0).is_empty() {
            return Err(bad("missing place_name"));
        }
        let lat: f64 = f(2).parse().map_err(|_| bad("bad latitude"))?;
        let lon: f64 = f(3).parse().map_err(|_| bad("bad longitude"))?;
        GeoPoint::new(lat, lon).map_err(|e| bad(&e.to_string()))?;
        g.insert(GazetteerEntry { place_name: f(0).to_owned(), admin_code: f(1).to_owned(), lat, lon }, line)?;
    }
    Ok(g)
}

/// Resolves a profile address of the form `place, admin` (exact pair) or a
/// bare `place` (only when exactly one entry carries that name).
pub fn gazetteer_geocode(profile_location: &str, gazetteer: &Gazetteer) -> Option<GeoPoint> {
    match profile_location.rsplit_once(',') {
        Some((place, admin)) => gazetteer
            .by_pair
            .get(&(normalize_place(place), normalize_place(admin)))
            .copied(),
        None => match gazetteer.by_place.get(&normalize_place(profile_location))?.as_slice() {
            [only] => Some(*only),
            _ => None,
        },
    }
}
