use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Value};

use crate::Scalar;

use super::{GeoError, GeoPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RegionLevel {
    Metro,
    County,
    Zcta,
}

impl RegionLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLevel::Metro => "metro",
            RegionLevel::County => "county",
            RegionLevel::Zcta => "zcta",
        }
    }
}

impl fmt::Display for RegionLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RegionLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "metro" => Ok(RegionLevel::Metro),
            "county" => Ok(RegionLevel::County),
            "zcta" => Ok(RegionLevel::Zcta),
            other => Err(format!("unknown region level `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox<T = f64> {
    pub min_lon: T,
    pub min_lat: T,
    pub max_lon: T,
    pub max_lat: T,
}

impl<T: Scalar> BBox<T> {
    fn empty() -> Self {
        Self {
            min_lon: T::infinity(),
            min_lat: T::infinity(),
            max_lon: T::neg_infinity(),
            max_lat: T::neg_infinity(),
        }
    }

    fn extend(&mut self, [lon, lat]: [T; 2]) {
        self.min_lon = self.min_lon.min(lon);
        self.min_lat = self.min_lat.min(lat);
        self.max_lon = self.max_lon.max(lon);
        self.max_lat = self.max_lat.max(lat);
    }

    pub fn union(&self, other: &Self) -> Self {
        Self {
            min_lon: self.min_lon.min(other.min_lon),
            min_lat: self.min_lat.min(other.min_lat),
            max_lon: self.max_lon.max(other.max_lon),
            max_lat: self.max_lat.max(other.max_lat),
        }
    }

    pub fn contains(&self, p: GeoPoint<T>) -> bool {
        p.lon >= self.min_lon && p.lon <= self.max_lon && p.lat >= self.min_lat && p.lat <= self.max_lat
    }
}

/// A closed ring of `[lon, lat]` vertices (first vertex repeated last).
#[derive(Debug, Clone, PartialEq)]
pub struct Ring<T = f64> {
    vertices: Vec<[T; 2]>,
}

impl<T: Scalar> Ring<T> {
    /// Accepts an already closed ring of at least 4 vertices.
    pub fn new(vertices: Vec<[T; 2]>) -> Result<Self, GeoError> {
        if vertices.len() < 4 || vertices.first() != vertices.last() {
            return Err(GeoError::DegenerateRing(vertices.len()));
        }
        Ok(Self { vertices })
    }

    /// Closes the ring if the last vertex does not repeat the first.
    /// Returns the ring and whether closing was needed.
    pub fn closing(mut vertices: Vec<[T; 2]>) -> Result<(Self, bool), GeoError> {
        let open = !vertices.is_empty() && vertices.first() != vertices.last();
        if open {
            vertices.push(vertices[0]);
        }
        Ok((Self::new(vertices)?, open))
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    fn edges(&self) -> impl Iterator<Item = ([T; 2], [T; 2])> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Exterior ring followed by hole rings.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<T = f64> {
    pub rings: Vec<Ring<T>>,
}

impl<T: Scalar> Polygon<T> {
    pub fn exterior(&self) -> &Ring<T> {
        &self.rings[0]
    }

    pub fn holes(&self) -> &[Ring<T>] {
        &self.rings[1..]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegionBoundary<T = f64> {
    pub region_id: String,
    pub name: String,
    pub level: RegionLevel,
    /// One entry per part; a GeoJSON MultiPolygon yields several.
    pub polygons: Vec<Polygon<T>>,
    /// Feature properties as read, kept for overlay output.
    pub properties: Map<String, Value>,
    bbox: BBox<T>,
}

impl<T: Scalar> RegionBoundary<T> {
    pub fn new(
        region_id: impl Into<String>,
        name: impl Into<String>,
        level: RegionLevel,
        polygons: Vec<Polygon<T>>,
    ) -> Self {
        let mut bbox = BBox::empty();
        for v in polygons.iter().flat_map(|p| &p.rings).flat_map(|r| r.vertices()) {
            bbox.extend(*v);
        }
        Self {
            region_id: region_id.into(),
            name: name.into(),
            level,
            polygons,
            properties: Map::new(),
            bbox,
        }
    }

    /// Single-polygon region from an axis-aligned rectangle.
    pub fn rectangle(region_id: impl Into<String>, level: RegionLevel, min: [T; 2], max: [T; 2]) -> Self {
        let ring = Ring::new(vec![
            [min[0], min[1]],
            [max[0], min[1]],
            [max[0], max[1]],
            [min[0], max[1]],
            [min[0], min[1]],
        ])
        .expect("rectangle ring is closed");
        let id = region_id.into();
        Self::new(id.clone(), id, level, vec![Polygon { rings: vec![ring] }])
    }

    pub fn bbox(&self) -> BBox<T> {
        self.bbox
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring<T>> {
        self.polygons.iter().flat_map(|p| &p.rings)
    }

    /// Mean of the exterior-ring vertices of the first part; used as a
    /// representative location (e.g. distance to the storm track).
    pub fn centroid(&self) -> GeoPoint<T> {
        let ring = self.polygons[0].exterior().vertices();
        let body = &ring[..ring.len() - 1];
        let n = T::from_usize(body.len()).unwrap_or_else(T::one);
        let (sx, sy) = body
            .iter()
            .fold((T::zero(), T::zero()), |(sx, sy), v| (sx + v[0], sy + v[1]));
        GeoPoint { lat: sy / n, lon: sx / n }
    }
}

fn on_segment<T: Scalar>(p: [T; 2], a: [T; 2], b: [T; 2]) -> bool {
    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
    cross == T::zero()
        && p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

/// Even-odd ray casting in the lon/lat plane over every ring of the region.
/// Points on any ring edge count as inside.
pub fn point_in_region<T: Scalar>(p: GeoPoint<T>, region: &RegionBoundary<T>) -> bool {
    if !region.bbox.contains(p) {
        return false;
    }
    let q = [p.lon, p.lat];
    let mut inside = false;
    for ring in region.rings() {
        for (a, b) in ring.edges() {
            if on_segment(q, a, b) {
                return true;
            }
            if (a[1] > q[1]) != (b[1] > q[1]) {
                let x = a[0] + (q[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if q[0] < x {
                    inside = !inside;
                }
            }
        }
    }
    inside
}
