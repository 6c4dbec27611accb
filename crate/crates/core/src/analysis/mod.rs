//! End-to-end analyses built on the activity summaries: keyword relevance,
//! activity-distance curves, the city-by-keyword heatmap, the daily
//! correlation series, damage-correlation tables and the nowcast ranking.

mod corpus;
mod curves;
mod damage;
mod keywords;
mod nowcast;
mod series;

use thiserror::Error;

pub use corpus::{
    assign_messages, default_city_subset, distances_to_track, fixture_damage, fixture_summaries, Corpus,
};
pub use curves::{activity_distance_curve, heatmap_matrix, CurvePoint, DistanceCurve, Heatmap};
pub use damage::{
    damage_by_basis, damage_correlation_report, per_capita_damage, DamageBasis, DamageByBasis, KeywordScope,
    ReportCell, ReportOptions, Scope, DEFAULT_KEYWORD_POOL,
};
pub use keywords::{rank_keywords, KeywordRank, KeywordRanking, MIN_ACTIVE_CITIES};
pub use nowcast::{nowcast, Exclusion, ExclusionReason, NowcastEntry, NowcastReport};
pub use series::{daily_correlation_series, CorrelationSeries, SeriesBin, SeriesSpan, MIN_ACTIVE_REGIONS};

use crate::stats::StatsError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no distance for city `{0}`")]
    MissingDistance(String),
    #[error("no summary for city `{city}` and keyword `{keyword}`")]
    MissingSummary { city: String, keyword: String },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Geo(#[from] crate::geo::GeoError),
}
