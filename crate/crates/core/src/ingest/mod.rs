//! Parsers for every external input: messages, region boundaries,
//! population and damage tables, the storm track and the gazetteer.
//!
//! Row-oriented parsers collect line-numbered diagnostics for rejected rows
//! instead of failing; only unreadable sources and table-level violations
//! (duplicate population keys, non-monotone track) are fatal.

mod fixture;
mod gazetteer;
mod messages;
mod regions;
mod tables;

use std::fmt;

use thiserror::Error;

pub use fixture::{sandy_counties, CountyRow, SANDY_COUNTIES_CSV};
pub use gazetteer::{gazetteer_geocode, normalize_place, parse_gazetteer, Gazetteer, GazetteerEntry};
pub use messages::{geocode_missing, parse_messages, write_messages, MessageRecord, MESSAGE_COLUMNS};
pub use regions::{parse_regions, region_feature, write_feature_collection, write_regions};
pub use tables::{
    parse_damage, parse_keyed_table, parse_population, parse_track, track_polyline, write_damage, write_population,
    write_track, DamageRecord, DamageSource, DamageTable, KeyedTable, PopulationEntry, PopulationTable, TableKind,
    TrackPoint,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("missing column `{0}` in header")]
    MissingColumn(&'static str),
    #[error("expected a GeoJSON FeatureCollection")]
    NotFeatureCollection,
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: duplicate region_id `{region_id}`")]
    DuplicateKey { line: u64, region_id: String },
    #[error("line {line}: track timestamps must be strictly increasing")]
    NonMonotoneTrack { line: u64 },
    #[error("line {line}: duplicate gazetteer entry `{place}, {admin}`")]
    DuplicatePlace { line: u64, place: String, admin: String },
}

/// Where in the source a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Line(u64),
    Feature(usize),
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Line(n) => write!(f, "line {n}"),
            Position::Feature(n) => write!(f, "feature {n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub position: Position,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.position, self.message)
    }
}

/// Output of a tolerant parser.
///
/// `records.len() + rejected + filtered_out == rows` always holds.
#[derive(Debug, Clone)]
pub struct Parsed<T> {
    pub records: Vec<T>,
    pub diagnostics: Vec<Diagnostic>,
    pub rows: usize,
    pub rejected: usize,
    pub filtered_out: usize,
}

impl<T> Default for Parsed<T> {
    fn default() -> Self {
        Self { records: Vec::new(), diagnostics: Vec::new(), rows: 0, rejected: 0, filtered_out: 0 }
    }
}

impl<T> Parsed<T> {
    fn reject(&mut self, position: Position, message: impl Into<String>) {
        self.rejected += 1;
        self.diagnostics.push(Diagnostic { position, message: message.into() });
    }

    fn warn(&mut self, position: Position, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic { position, message: message.into() });
    }
}

/// Finds the column index for `name`, case-insensitively.
fn column(headers: &csv::StringRecord, name: &'static str) -> Result<usize, IngestError> {
    optional_column(headers, name).ok_or(IngestError::MissingColumn(name))
}

fn optional_column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
}

fn csv_reader<R: std::io::Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}
