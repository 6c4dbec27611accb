use std::collections::HashSet;
use std::io::{Read, Write};

use serde_json::{json, Map, Value};

use crate::geo::{Polygon, RegionLevel, Ring};
use crate::RegionBoundary;

use super::{IngestError, Parsed, Position};

fn property_string(props: &serde_json::Map<String, Value>, key: &str) -> Option<String> {
    match props.get(key)? {
        Value::String(s) if !s.trim().is_empty() => Some(s.trim().to_owned()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn parse_ring(value: &Value) -> Result<(Ring<f64>, bool), String> {
    let coords = value.as_array().ok_or("ring is not an array")?;
    let mut vertices = Vec::with_capacity(coords.len());
    for c in coords {
        let pair = c.as_array().filter(|a| a.len() >= 2).ok_or("vertex is not a coordinate pair")?;
        let lon = pair[0].as_f64().ok_or("non-numeric longitude")?;
        let lat = pair[1].as_f64().ok_or("non-numeric latitude")?;
        if !(-180.0..=180.0).contains(&lon) || !(-90.0..=90.0).contains(&lat) {
            return Err(format!("vertex ({lon}, {lat}) out of range"));
        }
        vertices.push([lon, lat]);
    }
    Ring::closing(vertices).map_err(|e| e.to_string())
}

/// Returns the polygons and the number of rings that had to be closed.
fn parse_polygon(value: &Value) -> Result<(Polygon<f64>, usize), String> {
    let rings = value.as_array().filter(|r| !r.is_empty()).ok_or("polygon has no rings")?;
    let mut closed = 0;
    let mut out = Vec::with_capacity(rings.len());
    for r in rings {
        let (ring, was_open) = parse_ring(r)?;
        closed += usize::from(was_open);
        out.push(ring);
    }
    Ok((Polygon { rings: out }, closed))
}

fn parse_geometry(geometry: &Value) -> Result<(Vec<Polygon<f64>>, usize), String> {
    let kind = geometry.get("type").and_then(Value::as_str).ok_or("geometry has no type")?;
    let coords = geometry.get("coordinates").ok_or("geometry has no coordinates")?;
    match kind {
        "Polygon" => parse_polygon(coords).map(|(p, c)| (vec![p], c)),
        "MultiPolygon" => {
            let parts = coords.as_array().filter(|p| !p.is_empty()).ok_or("multipolygon has no parts")?;
            let mut polygons = Vec::with_capacity(parts.len());
            let mut closed = 0;
            for part in parts {
                let (p, c) = parse_polygon(part)?;
                polygons.push(p);
                closed += c;
            }
            Ok((polygons, closed))
        }
        other => Err(format!("unsupported geometry type `{other}`")),
    }
}

/// Parses a GeoJSON FeatureCollection of Polygon/MultiPolygon features with
/// `region_id`, `name` and `level` properties.
pub fn parse_regions<R: Read>(source: R) -> Result<Parsed<RegionBoundary>, IngestError> {
    let doc: Value = serde_json::from_reader(source)?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(IngestError::NotFeatureCollection);
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or(IngestError::NotFeatureCollection)?;

    let mut out = Parsed::default();
    let mut seen: HashSet<(RegionLevel, String)> = HashSet::new();
    for (i, feature) in features.iter().enumerate() {
        out.rows += 1;
        let pos = Position::Feature(i + 1);
        let empty = serde_json::Map::new();
        let props = feature.get("properties").and_then(Value::as_object).unwrap_or(&empty);
        let Some(region_id) = property_string(props, "region_id") else {
            out.reject(pos, "missing region_id");
            continue;
        };
        let level = match props.get("level").and_then(Value::as_str).map(str::parse::<RegionLevel>) {
            Some(Ok(level)) => level,
            Some(Err(e)) => {
                out.reject(pos, format!("region `{region_id}`: {e}"));
                continue;
            }
            None => {
                out.reject(pos, format!("region `{region_id}`: missing level"));
                continue;
            }
        };
        let name = property_string(props, "name").unwrap_or_else(|| region_id.clone());
        let Some(geometry) = feature.get("geometry").filter(|g| !g.is_null()) else {
            out.reject(pos, format!("region `{region_id}`: missing geometry"));
            continue;
        };
        let (polygons, closed) = match parse_geometry(geometry) {
            Ok(v) => v,
            Err(e) => {
                out.reject(pos, format!("region `{region_id}`: {e}"));
                continue;
            }
        };
        if !seen.insert((level, region_id.clone())) {
            out.reject(pos, format!("duplicate region_id `{region_id}` at level {level}"));
            continue;
        }
        if closed > 0 {
            out.warn(pos, format!("region `{region_id}`: auto-closed {closed} open ring(s)"));
        }
        let mut region = RegionBoundary::new(region_id, name, level, polygons);
        region.properties = props.clone();
        out.records.push(region);
    }
    Ok(out)
}

fn geometry_value(region: &RegionBoundary) -> Value {
    let polygon = |p: &Polygon<f64>| -> Value {
        p.rings.iter().map(|r| json!(r.vertices())).collect()
    };
    match region.polygons.as_slice() {
        [single] => json!({"type": "Polygon", "coordinates": polygon(single)}),
        many => json!({"type": "MultiPolygon", "coordinates": many.iter().map(polygon).collect::<Vec<_>>()}),
    }
}

/// GeoJSON feature for `region`. Stored properties are kept; `region_id`,
/// `name` and `level` always reflect the record, and `extra` is appended.
pub fn region_feature(region: &RegionBoundary, extra: Map<String, Value>) -> Value {
    let mut props = region.properties.clone();
    props.insert("region_id".into(), Value::String(region.region_id.clone()));
    props.insert("name".into(), Value::String(region.name.clone()));
    props.insert("level".into(), Value::String(region.level.as_str().into()));
    props.extend(extra);
    json!({"type": "Feature", "properties": props, "geometry": geometry_value(region)})
}

/// Writes a FeatureCollection that [`parse_regions`] reads back unchanged.
pub fn write_regions<W: Write>(sink: W, regions: &[RegionBoundary]) -> Result<(), IngestError> {
    let features: Vec<Value> = regions.iter().map(|r| region_feature(r, Map::new())).collect();
    write_feature_collection(sink, features)
}

pub fn write_feature_collection<W: Write>(mut sink: W, features: Vec<Value>) -> Result<(), IngestError> {
    let doc = json!({"type": "FeatureCollection", "features": features});
    serde_json::to_writer_pretty(&mut sink, &doc)?;
    sink.write_all(b"\n")?;
    Ok(())
}
