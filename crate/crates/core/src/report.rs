//! CSV and GeoJSON report writers.
//!
//! Every CSV starts with a block of `# key=value` lines describing the run,
//! followed by a fixed header. Statistics are printed with 6 significant
//! digits; undefined values are written as `NA`.

use std::collections::BTreeMap;
use std::io::Write;

use serde_json::{Map, Value};

use crate::analysis::{CorrelationSeries, NowcastReport, ReportCell};
use crate::ingest::{region_feature, write_feature_collection, IngestError};
use crate::stats::rank_discrepancy;
use crate::{Method, RegionBoundary};

pub const CORRELATION_COLUMNS: [&str; 10] = [
    "scope",
    "keyword",
    "damage_source",
    "normalization",
    "transform",
    "method",
    "n",
    "coefficient",
    "p_value",
    "excluded",
];
pub const SERIES_COLUMNS: [&str; 6] = ["bin_start", "active_regions", "messages", "method", "coefficient", "p_value"];
pub const NOWCAST_COLUMNS: [&str; 5] = ["rank", "region_id", "per_capita_activity", "n_original", "population"];
pub const EXCLUSION_COLUMNS: [&str; 2] = ["region_id", "reason"];

/// Ordered `key=value` pairs echoed at the top of each report.
pub type Header = Vec<(String, String)>;

/// Formats `v` with 6 significant digits, trailing zeros removed.
pub fn fmt_sig(v: f64) -> String {
    if !v.is_finite() {
        return "NA".into();
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_owned()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

fn write_header<W: Write>(sink: &mut W, header: &Header) -> std::io::Result<()> {
    for (k, v) in header {
        writeln!(sink, "# {k}={}", v.replace(['\n', '\r'], " "))?;
    }
    Ok(())
}

fn writer<W: Write>(mut sink: W, header: &Header, columns: &[&str]) -> Result<csv::Writer<W>, IngestError> {
    write_header(&mut sink, header)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(columns)?;
    Ok(w)
}

pub fn write_correlations<W: Write>(sink: W, header: &Header, cells: &[ReportCell]) -> Result<(), IngestError> {
    let mut w = writer(sink, header, &CORRELATION_COLUMNS)?;
    for c in cells {
        w.write_record([
            c.scope.as_str().to_owned(),
            c.keyword.clone(),
            c.damage_source.as_str().to_owned(),
            c.normalization.as_str().to_owned(),
            c.result.transform.as_str().to_owned(),
            c.result.method.as_str().to_owned(),
            c.result.n.to_string(),
            fmt_sig(c.result.coefficient),
            fmt_sig(c.result.p_value),
            c.excluded.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per bin and method; sentiment rows carry a `sentiment_` prefix
/// on the method.
pub fn write_series<W: Write>(sink: W, header: &Header, series: &CorrelationSeries) -> Result<(), IngestError> {
    let mut w = writer(sink, header, &SERIES_COLUMNS)?;
    for b in &series.bins {
        let start = b.bin_start.format("%Y-%m-%dT%H:%M:%SZ").to_string();
        for (prefix, results) in [("", &b.activity), ("sentiment_", &b.sentiment)] {
            for r in results {
                w.write_record([
                    start.clone(),
                    b.active_regions.to_string(),
                    b.messages.to_string(),
                    format!("{prefix}{}", r.method.as_str()),
                    fmt_sig(r.coefficient),
                    fmt_sig(r.p_value),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_nowcast<W: Write>(sink: W, header: &Header, report: &NowcastReport) -> Result<(), IngestError> {
    let mut w = writer(sink, header, &NOWCAST_COLUMNS)?;
    for e in &report.entries {
        w.write_record([
            e.rank.to_string(),
            e.region_id.clone(),
            fmt_sig(e.per_capita_activity),
            e.n_original.to_string(),
            e.population.map(|p| p.to_string()).unwrap_or_else(|| "NA".into()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_exclusions<W: Write>(sink: W, header: &Header, report: &NowcastReport) -> Result<(), IngestError> {
    let mut w = writer(sink, header, &EXCLUSION_COLUMNS)?;
    for x in &report.excluded {
        w.write_record([x.region_id.clone(), x.reason.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Region features annotated with per-capita activity, per-capita damage
/// and their rank discrepancy. Regions missing either value get nulls and
/// do not enter the discrepancy ranking.
pub fn overlay_features(
    regions: &[RegionBoundary],
    activity_pc: &BTreeMap<String, f64>,
    damage_pc: &BTreeMap<String, f64>,
) -> Vec<Value> {
    let paired: Vec<(&str, f64, f64)> = regions
        .iter()
        .filter_map(|r| {
            let a = activity_pc.get(&r.region_id).filter(|v| v.is_finite())?;
            let d = damage_pc.get(&r.region_id).filter(|v| v.is_finite())?;
            Some((r.region_id.as_str(), *a, *d))
        })
        .collect();
    let xs: Vec<f64> = paired.iter().map(|p| p.1).collect();
    let ys: Vec<f64> = paired.iter().map(|p| p.2).collect();
    let disc = rank_discrepancy(&xs, &ys).expect("equal lengths");
    let by_region: BTreeMap<&str, f64> = paired.iter().zip(disc).map(|(p, d)| (p.0, d)).collect();
    let num = |v: Option<f64>| v.and_then(serde_json::Number::from_f64).map(Value::Number).unwrap_or(Value::Null);
    regions
        .iter()
        .map(|r| {
            let mut extra = Map::new();
            extra.insert("activity_pc".into(), num(activity_pc.get(&r.region_id).copied()));
            extra.insert("damage_pc".into(), num(damage_pc.get(&r.region_id).copied()));
            extra.insert("rank_discrepancy".into(), num(by_region.get(r.region_id.as_str()).copied()));
            region_feature(r, extra)
        })
        .collect()
}

pub fn write_overlay<W: Write>(
    sink: W,
    regions: &[RegionBoundary],
    activity_pc: &BTreeMap<String, f64>,
    damage_pc: &BTreeMap<String, f64>,
) -> Result<(), IngestError> {
    write_feature_collection(sink, overlay_features(regions, activity_pc, damage_pc))
}

/// Human-readable method label used in headers and messages.
pub fn method_list(methods: &[Method]) -> String {
    methods.iter().map(|m| m.as_str()).collect::<Vec<_>>().join(",")
}
