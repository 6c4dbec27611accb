//! Damage nowcasting from geotagged social-media activity.
//!
//! The pipeline parses message streams and Census-style boundaries
//! ([`ingest`]), assigns messages to regions ([`geo`]), aggregates them into
//! per-region activity summaries over time bins ([`metrics`]), and correlates
//! normalized activity and sentiment against per-capita damage ([`stats`],
//! [`analysis`]). [`simulate`] produces seeded synthetic corpora with known
//! ground truth, and [`report`] writes the CSV and GeoJSON outputs.
//!
//! Geometry and correlation code is generic over the floating-point scalar
//! (see [`Scalar`]); the aliases below fix it to `f64`, which is what the
//! file parsers produce.

pub mod analysis;
pub mod geo;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod scalar;
pub mod simulate;
pub mod stats;

pub use scalar::Scalar;

/// A latitude/longitude pair in degrees.
pub type GeoPoint = geo::GeoPoint<f64>;
/// A region boundary with `f64` vertices.
pub type RegionBoundary = geo::RegionBoundary<f64>;
/// Grid index over `f64` region bounding boxes.
pub type SpatialIndex = geo::SpatialIndex<f64>;
/// Correlation output for `f64` inputs.
pub type CorrelationResult = stats::CorrelationResult<f64>;

pub use analysis::{CorrelationSeries, KeywordRanking, NowcastReport};
pub use ingest::{DamageRecord, DamageSource, MessageRecord, TrackPoint};
pub use metrics::{ActivitySummary, Normalization, TimeWindow};
pub use stats::{Method, Transform};
