//! Spherical distances, planar point-in-polygon and the grid-indexed
//! spatial join that assigns messages to regions.

mod index;
mod region;
mod sphere;

pub use index::{spatial_join, spatial_join_brute, SpatialIndex, DEFAULT_CELL_DEG};
pub use region::{point_in_region, BBox, Polygon, RegionBoundary, RegionLevel, Ring};
pub use sphere::{haversine_km, point_to_track_km, GeoPoint, EARTH_RADIUS_KM};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("latitude out of range: {0}")]
    LatitudeOutOfRange(f64),
    #[error("longitude out of range: {0}")]
    LongitudeOutOfRange(f64),
    #[error("track has no points")]
    EmptyTrack,
    #[error("index cell size must be positive and finite, got {0}")]
    BadCellSize(f64),
    #[error("index would need {0} cells; use a larger cell size")]
    IndexTooLarge(usize),
    #[error("ring needs at least 4 vertices with first = last, got {0}")]
    DegenerateRing(usize),
}
