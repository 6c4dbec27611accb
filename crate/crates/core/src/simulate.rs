//! Seeded synthetic corpora with known ground truth.
//!
//! Regions are non-overlapping rectangles on a jittered grid. For each
//! region, day and keyword the message count is drawn from a Poisson law
//! whose per-resident daily rate is
//!
//! ```text
//! base_rate + event_amplitude * max(0, 1 - d / decay_cutoff_km) * temporal(k)
//! ```
//!
//! where `d` is the distance from the region's centroid to the track and
//! `k` the day offset from landfall. `temporal(k)` is
//! `post_event_persistence^k` from landfall on and
//! `pre_event_weight * post_event_persistence^-k` before it. On the
//! landfall day every keyword's rate is raised by `media_burst` times a
//! per-region factor with mean 1 drawn independently of distance, so the
//! bump is spatially uniform on average but unrelated to damage.
//!
//! Damage couples to realized activity: a region's damage in USD is
//! `k * messages in the damage window * exp(sigma * Z)`, so per-capita
//! damage is proportional to per-capita activity up to lognormal noise.
//!
//! The generator uses ChaCha8 streams: stream 0 lays out regions and
//! populations, stream `i + 1` draws everything for region `i`. Output is
//! therefore identical for a given seed whatever the thread count.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geo::{point_to_track_km, GeoError, RegionLevel};
use crate::ingest::{
    self, track_polyline, write_damage, write_messages, write_population, write_regions, write_track, DamageTable,
    IngestError, PopulationTable,
};
use crate::metrics::bin_index;
use crate::stats::correlate;
use crate::{DamageRecord, DamageSource, MessageRecord, Method, RegionBoundary, TimeWindow, TrackPoint, Transform};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KeywordProfile {
    pub name: String,
    /// Messages per resident per day, everywhere and always.
    pub base_rate: f64,
    /// Additional rate at zero distance on the landfall day.
    pub event_amplitude: f64,
    pub decay_cutoff_km: f64,
    /// Day-over-day retention of the event response.
    pub post_event_persistence: f64,
    /// Scale of the response on days before landfall.
    pub pre_event_weight: f64,
}

impl Default for KeywordProfile {
    fn default() -> Self {
        Self {
            name: "hurricane".into(),
            base_rate: 1e-4,
            event_amplitude: 2e-3,
            decay_cutoff_km: 1350.0,
            post_event_persistence: 0.8,
            pre_event_weight: 0.5,
        }
    }
}

impl KeywordProfile {
    pub fn flat(name: &str, base_rate: f64) -> Self {
        Self { name: name.into(), base_rate, event_amplitude: 0.0, ..Self::default() }
    }

    /// Distance response in `[0, 1]`.
    pub fn intensity(&self, distance_km: f64) -> f64 {
        (1.0 - distance_km / self.decay_cutoff_km).max(0.0)
    }

    pub fn temporal(&self, day: i64) -> f64 {
        let p = self.post_event_persistence;
        if day >= 0 {
            p.powi(day as i32)
        } else {
            self.pre_event_weight * p.powi((-day) as i32)
        }
    }

    /// Expected messages per resident on `day`, without the media burst.
    pub fn rate(&self, distance_km: f64, day: i64) -> f64 {
        self.base_rate + self.event_amplitude * self.intensity(distance_km) * self.temporal(day)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegionLayout {
    pub count: usize,
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    /// Populations are log-uniform in `[population_min, population_max]`.
    pub population_min: u64,
    pub population_max: u64,
    /// Size of each region's user pool relative to its population.
    pub users_per_capita: f64,
}

impl Default for RegionLayout {
    fn default() -> Self {
        Self {
            count: 200,
            lat_min: 34.0,
            lat_max: 46.0,
            lon_min: -88.0,
            lon_max: -68.0,
            population_min: 2_000,
            population_max: 60_000,
            users_per_capita: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetweetModel {
    /// Retweet probability next to the track.
    pub base: f64,
    /// Increase in probability per 1000 km.
    pub slope_per_1000km: f64,
}

impl Default for RetweetModel {
    fn default() -> Self {
        Self { base: 0.2, slope_per_1000km: 0.2 }
    }
}

impl RetweetModel {
    pub fn probability(&self, distance_km: f64) -> f64 {
        (self.base + self.slope_per_1000km * distance_km / 1000.0).clamp(0.0, 0.95)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DamageModel {
    /// USD per message in the damage window.
    pub k: f64,
    /// Lognormal noise scale; 0 makes damage proportional to activity.
    pub sigma: f64,
    pub window: TimeWindow,
    /// Share of ex-post damage reported as FEMA assistance; the rest is
    /// insurance.
    pub fema_share: f64,
    /// Noise of the modeled (Hazus) estimate around the ex-post damage.
    pub hazus_sigma: f64,
}

impl Default for DamageModel {
    fn default() -> Self {
        Self {
            k: 250_000.0,
            sigma: 0.5,
            window: "2012-10-31..2012-11-12".parse().expect("valid window"),
            fema_share: 0.3,
            hazus_sigma: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountModel {
    Poisson,
    /// Counts are the expected values rounded to the nearest integer and
    /// users are assigned round-robin.
    Expected,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub regions: RegionLayout,
    /// `[lat, lon]` vertices of the track.
    pub track: Vec<[f64; 2]>,
    /// Track vertex reached at landfall.
    pub landfall_vertex: usize,
    pub track_step_hours: i64,
    /// Messages are generated for whole days in this window.
    pub timeline: TimeWindow,
    pub landfall: DateTime<Utc>,
    pub keywords: Vec<KeywordProfile>,
    /// Per-resident rate added to every keyword on the landfall day.
    pub media_burst: f64,
    /// Lognormal scale of the per-region burst factor.
    pub media_burst_dispersion: f64,
    pub retweet: RetweetModel,
    pub damage: DamageModel,
    pub count_model: CountModel,
    /// Chance that an original message gets rebroadcast.
    pub popular_probability: f64,
    /// Mean sentiment falls by this much at zero distance.
    pub sentiment_shift: f64,
    pub sentiment_sd: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            regions: RegionLayout::default(),
            track: vec![
                [25.0, -76.5],
                [30.0, -75.5],
                [35.0, -72.0],
                [38.0, -72.5],
                [39.4, -74.4],
                [40.2, -77.5],
                [41.0, -79.5],
            ],
            landfall_vertex: 4,
            track_step_hours: 12,
            timeline: "2012-10-20..2012-11-12".parse().expect("valid window"),
            landfall: Utc.with_ymd_and_hms(2012, 10, 30, 0, 0, 0).unwrap(),
            keywords: vec![
                KeywordProfile { name: "sandy".into(), event_amplitude: 3e-3, ..KeywordProfile::default() },
                KeywordProfile::default(),
                KeywordProfile {
                    name: "power".into(),
                    base_rate: 5e-5,
                    event_amplitude: 1.5e-3,
                    post_event_persistence: 0.9,
                    pre_event_weight: 0.1,
                    ..KeywordProfile::default()
                },
            ],
            media_burst: 0.0,
            media_burst_dispersion: 1.0,
            retweet: RetweetModel::default(),
            damage: DamageModel::default(),
            count_model: CountModel::Poisson,
            popular_probability: 0.1,
            sentiment_shift: 0.5,
            sentiment_sd: 0.3,
        }
    }
}

impl SimConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    /// Default configuration with a landfall-day media burst.
    pub fn media_burst_scenario(seed: u64) -> Self {
        Self { seed, media_burst: 0.005, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::Config(m));
        let r = &self.regions;
        if r.count == 0 {
            return bad("region count must be positive".into());
        }
        if !(r.lat_min < r.lat_max && r.lon_min < r.lon_max) {
            return bad("region extent is empty".into());
        }
        if r.population_min == 0 || r.population_min > r.population_max {
            return bad("population range must satisfy 0 < min <= max".into());
        }
        if !(r.users_per_capita > 0.0) {
            return bad("users_per_capita must be positive".into());
        }
        if self.track.is_empty() || self.landfall_vertex >= self.track.len() || self.track_step_hours <= 0 {
            return bad("track needs vertices, a landfall vertex and a positive step".into());
        }
        for [lat, lon] in &self.track {
            crate::GeoPoint::new(*lat, *lon)?;
        }
        for k in &self.keywords {
            if k.name.trim().is_empty() || k.name.contains(';') {
                return bad(format!("keyword `{}` must be non-empty without `;`", k.name));
            }
            if !(k.base_rate >= 0.0 && k.event_amplitude >= 0.0) {
                return bad(format!("keyword `{}`: rates must be >= 0", k.name));
            }
            if !(k.decay_cutoff_km > 0.0) {
                return bad(format!("keyword `{}`: cutoff must be > 0", k.name));
            }
            if !(k.post_event_persistence >= 0.0 && k.pre_event_weight >= 0.0) {
                return bad(format!("keyword `{}`: temporal weights must be >= 0", k.name));
            }
        }
        if !(self.media_burst >= 0.0 && self.media_burst_dispersion >= 0.0) {
            return bad("media_burst and its dispersion must be >= 0".into());
        }
        let d = &self.damage;
        if !(d.k >= 0.0 && d.sigma >= 0.0 && d.hazus_sigma >= 0.0 && (0.0..=1.0).contains(&d.fema_share)) {
            return bad("damage model needs k >= 0, sigma >= 0 and fema_share in [0, 1]".into());
        }
        if !((0.0..=1.0).contains(&self.popular_probability) && self.sentiment_sd >= 0.0) {
            return bad("popular_probability must be in [0, 1] and sentiment_sd >= 0".into());
        }
        Ok(())
    }

    /// Day offsets from landfall covered by the timeline.
    pub fn days(&self) -> std::ops::RangeInclusive<i64> {
        let day = Duration::hours(24);
        let first = bin_index(self.timeline.start, self.landfall, day);
        let last = bin_index(self.timeline.end - Duration::nanoseconds(1), self.landfall, day);
        first..=last
    }

    fn day_window(&self, day: i64) -> TimeWindow {
        crate::metrics::bin_window(day, self.landfall, Duration::hours(24))
    }

    /// Expected messages per resident for one keyword on one day, for a
    /// region whose burst factor is `burst_factor`.
    pub fn expected_rate(&self, profile: &KeywordProfile, distance_km: f64, day: i64, burst_factor: f64) -> f64 {
        profile.rate(distance_km, day) + if day == 0 { self.media_burst * burst_factor } else { 0.0 }
    }

    pub fn track_points(&self) -> Vec<TrackPoint> {
        self.track
            .iter()
            .enumerate()
            .map(|(i, [lat, lon])| TrackPoint {
                timestamp: self.landfall + Duration::hours(self.track_step_hours * (i as i64 - self.landfall_vertex as i64)),
                lat: *lat,
                lon: *lon,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthRow {
    pub region_id: String,
    /// Expected messages per resident over the damage window.
    pub latent_rate: f64,
    pub expected_damage_pc: f64,
    pub realized_damage_pc: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    /// Kendall τ between realized per-capita activity in the damage window
    /// and realized per-capita damage, over regions active in that window.
    pub kendall: Option<f64>,
    pub rows: Vec<TruthRow>,
}

#[derive(Debug, Clone)]
pub struct SimBundle {
    pub config: SimConfig,
    pub regions: Vec<RegionBoundary>,
    pub distances_km: BTreeMap<String, f64>,
    pub population: PopulationTable,
    /// Ordered by region id, then timestamp.
    pub messages: Vec<MessageRecord>,
    pub damage: DamageTable,
    pub track: Vec<TrackPoint>,
    pub truth: GroundTruth,
}

fn layout(config: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<(RegionBoundary, u64)> {
    let r = &config.regions;
    let (w, h) = (r.lon_max - r.lon_min, r.lat_max - r.lat_min);
    let cols = ((r.count as f64 * w / h).sqrt().ceil() as usize).clamp(1, r.count);
    let rows = r.count.div_ceil(cols);
    let (cw, ch) = (w / cols as f64, h / rows as f64);
    let width = r.count.to_string().len().max(4);
    let (lo, hi) = ((r.population_min as f64).ln(), (r.population_max as f64).ln());
    (0..r.count)
        .map(|i| {
            let (row, col) = (i / cols, i % cols);
            let jx = rng.random_range(-0.1..=0.1);
            let jy = rng.random_range(-0.1..=0.1);
            let cx = r.lon_min + (col as f64 + 0.5 + jx) * cw;
            let cy = r.lat_min + (row as f64 + 0.5 + jy) * ch;
            let id = format!("R{:0width$}", i + 1);
            let region =
                RegionBoundary::rectangle(id, RegionLevel::Zcta, [cx - 0.3 * cw, cy - 0.3 * ch], [cx + 0.3 * cw, cy + 0.3 * ch]);
            let pop = if lo == hi { r.population_min } else { rng.random_range(lo..hi).exp().round() as u64 };
            (region, pop.clamp(r.population_min, r.population_max))
        })
        .collect()
}

/// `carried` is the running expected total for the keyword; expected
/// counts round the cumulative sum so totals stay within 0.5 of their
/// expectation.
fn draw_count(model: CountModel, lambda: f64, carried: &mut f64, rng: &mut ChaCha8Rng) -> u64 {
    let before = *carried;
    *carried += lambda.max(0.0);
    match model {
        CountModel::Expected => (carried.round() - before.round()) as u64,
        CountModel::Poisson if lambda > 0.0 => Poisson::new(lambda).expect("positive rate").sample(rng) as u64,
        CountModel::Poisson => 0,
    }
}

struct RegionDraw {
    messages: Vec<MessageRecord>,
    window_messages: u64,
    latent_rate: f64,
    noise: f64,
    hazus_noise: f64,
}

fn simulate_region(config: &SimConfig, index: usize, region: &RegionBoundary, pop: u64, distance: f64) -> RegionDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64 + 1);
    let [x0, y0] = region.rings().next().expect("rectangle ring").vertices()[0];
    let [x1, y1] = region.rings().next().expect("rectangle ring").vertices()[2];
    let pool = ((pop as f64 * config.regions.users_per_capita).round() as u64).max(1);
    let p_rt = config.retweet.probability(distance);
    let impact = (1.0 - distance / 1350.0).max(0.0);
    let burst_factor = if config.media_burst_dispersion > 0.0 {
        let s = config.media_burst_dispersion;
        (s * rng.sample::<f64, _>(StandardNormal) - s * s / 2.0).exp()
    } else {
        1.0
    };
    let mut round_robin = 0u64;
    let mut drawn: Vec<(i64, String, u64, MessageRecord)> = Vec::new();
    let mut latent_rate = 0.0;
    let mut carried = vec![0.0; config.keywords.len()];
    for day in config.days() {
        let window = config.day_window(day);
        let in_damage = config.damage.window.contains(window.start);
        for (profile, carried) in config.keywords.iter().zip(&mut carried) {
            let rate = config.expected_rate(profile, distance, day, burst_factor);
            if in_damage {
                latent_rate += rate;
            }
            let n = draw_count(config.count_model, pop as f64 * rate, carried, &mut rng);
            for _ in 0..n {
                let ms = rng.random_range(0..86_400_000i64);
                let user = match config.count_model {
                    CountModel::Poisson => rng.random_range(0..pool),
                    CountModel::Expected => {
                        round_robin += 1;
                        (round_robin - 1) % pool
                    }
                };
                let lon = x0 + (0.05 + 0.9 * rng.random::<f64>()) * (x1 - x0);
                let lat = y0 + (0.05 + 0.9 * rng.random::<f64>()) * (y1 - y0);
                let is_retweet = rng.random_bool(p_rt);
                let retweeted_count =
                    if !is_retweet && rng.random_bool(config.popular_probability) { rng.random_range(1..=5) } else { 0 };
                let z: f64 = rng.sample(StandardNormal);
                let sentiment = (-config.sentiment_shift * impact + config.sentiment_sd * z).clamp(-1.0, 1.0);
                let timestamp = window.start + Duration::milliseconds(ms);
                let record = MessageRecord {
                    message_id: String::new(),
                    user_id: format!("{}-u{user}", region.region_id),
                    timestamp,
                    location: Some(crate::GeoPoint { lat, lon }),
                    keywords: [profile.name.clone()].into(),
                    is_retweet,
                    retweeted_count,
                    sentiment: Some(sentiment),
                    profile_location: None,
                };
                drawn.push((ms + day * 86_400_000, profile.name.clone(), user, record));
            }
        }
    }
    drawn.sort_by(|a, b| (a.0, &a.1, a.2).cmp(&(b.0, &b.1, b.2)));
    let messages: Vec<MessageRecord> = drawn
        .into_iter()
        .enumerate()
        .map(|(i, (_, _, _, mut m))| {
            m.message_id = format!("{}-{:07}", region.region_id, i + 1);
            m
        })
        .collect();
    let window_messages = messages.iter().filter(|m| config.damage.window.contains(m.timestamp)).count() as u64;
    let noise = if config.damage.sigma > 0.0 {
        (config.damage.sigma * rng.sample::<f64, _>(StandardNormal)).exp()
    } else {
        1.0
    };
    let hazus_noise = if config.damage.hazus_sigma > 0.0 {
        (config.damage.hazus_sigma * rng.sample::<f64, _>(StandardNormal)).exp()
    } else {
        1.0
    };
    RegionDraw { messages, window_messages, latent_rate, noise, hazus_noise }
}

/// Generates a full bundle for `config`.
pub fn generate(config: &SimConfig) -> Result<SimBundle, SimError> {
    config.validate()?;
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let placed = layout(config, &mut master);
    let track = config.track_points();
    let polyline = track_polyline(&track);
    let distances: Vec<f64> = placed
        .iter()
        .map(|(r, _)| point_to_track_km(r.centroid(), &polyline))
        .collect::<Result<_, _>>()?;
    let draws: Vec<RegionDraw> = placed
        .par_iter()
        .zip(&distances)
        .enumerate()
        .map(|(i, ((region, pop), d))| simulate_region(config, i, region, *pop, *d))
        .collect();

    let mut damage = DamageTable::default();
    let mut rows = Vec::with_capacity(placed.len());
    let mut activity_pc = Vec::new();
    let mut damage_pc = Vec::new();
    let mut messages = Vec::new();
    for (((region, pop), draw), _) in placed.iter().zip(draws).zip(&distances) {
        let id = region.region_id.clone();
        let loss = config.damage.k * draw.window_messages as f64 * draw.noise;
        let fema = config.damage.fema_share * loss;
        for (amount, source) in [(fema, DamageSource::FemaIa), (loss - fema, DamageSource::Insurance), (loss * draw.hazus_noise, DamageSource::Hazus)] {
            damage.add(&DamageRecord { region_id: id.clone(), amount_usd: amount.max(0.0), source });
        }
        let realized = loss / *pop as f64;
        if draw.window_messages > 0 {
            activity_pc.push(draw.window_messages as f64 / *pop as f64);
            damage_pc.push(realized);
        }
        rows.push(TruthRow {
            region_id: id,
            latent_rate: draw.latent_rate,
            expected_damage_pc: config.damage.k * draw.latent_rate,
            realized_damage_pc: realized,
        });
        messages.extend(draw.messages);
    }
    let tau = correlate(&activity_pc, &damage_pc, Method::Kendall, Transform::Raw).expect("equal lengths");
    let truth = GroundTruth { kendall: (!tau.is_degenerate()).then_some(tau.coefficient), rows };

    Ok(SimBundle {
        config: config.clone(),
        distances_km: placed.iter().zip(&distances).map(|((r, _), d)| (r.region_id.clone(), *d)).collect(),
        population: placed.iter().map(|(r, p)| (r.region_id.clone(), *p)).collect(),
        regions: placed.into_iter().map(|(r, _)| r).collect(),
        messages,
        damage,
        track,
        truth,
    })
}

pub const BUNDLE_FILES: [&str; 7] = [
    "messages.csv",
    "regions.geojson",
    "population.csv",
    "damage.csv",
    "track.csv",
    "ground_truth.csv",
    "config.json",
];

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, SimError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

impl SimBundle {
    /// Writes the bundle files into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<(), SimError> {
        fs::create_dir_all(dir)?;
        write_messages(create(dir, "messages.csv")?, &self.messages)?;
        write_regions(create(dir, "regions.geojson")?, &self.regions)?;
        write_population(create(dir, "population.csv")?, &self.population)?;
        write_damage(create(dir, "damage.csv")?, &self.damage)?;
        write_track(create(dir, "track.csv")?, &self.track)?;
        write_ground_truth(create(dir, "ground_truth.csv")?, &self.truth)?;
        let mut cfg = create(dir, "config.json")?;
        serde_json::to_writer_pretty(&mut cfg, &self.config)?;
        cfg.write_all(b"\n")?;
        cfg.flush()?;
        Ok(())
    }
}

pub fn write_ground_truth<W: Write>(mut sink: W, truth: &GroundTruth) -> Result<(), SimError> {
    match truth.kendall {
        Some(t) => writeln!(sink, "# generative_kendall={t}")?,
        None => writeln!(sink, "# generative_kendall=NA")?,
    }
    writeln!(sink, "region_id,latent_rate,expected_damage_pc,realized_damage_pc")?;
    for r in &truth.rows {
        writeln!(sink, "{},{},{},{}", r.region_id, r.latent_rate, r.expected_damage_pc, r.realized_damage_pc)?;
    }
    sink.flush()?;
    Ok(())
}

pub fn parse_ground_truth<R: Read>(mut source: R) -> Result<GroundTruth, SimError> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let bad = |m: &str| SimError::Ingest(IngestError::Row { line: 0, message: m.to_owned() });
    let mut kendall = None;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix("# generative_kendall=") {
            kendall = match rest.trim() {
                "NA" => None,
                v => Some(v.parse().map_err(|_| bad("bad generative_kendall"))?),
            };
            continue;
        }
        if line.starts_with('#') || line.starts_with("region_id,") || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        let num = |j: usize| -> Result<f64, SimError> {
            f.get(j)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| SimError::Ingest(IngestError::Row { line: i as u64 + 1, message: "bad number".into() }))
        };
        rows.push(TruthRow {
            region_id: f[0].to_owned(),
            latent_rate: num(1)?,
            expected_damage_pc: num(2)?,
            realized_damage_pc: num(3)?,
        });
    }
    Ok(GroundTruth { kendall, rows })
}

/// Reads back the ingest-format files of a bundle directory.
pub struct BundleInputs {
    pub messages: Vec<MessageRecord>,
    pub regions: Vec<RegionBoundary>,
    pub population: PopulationTable,
    pub damage: DamageTable,
    pub track: Vec<TrackPoint>,
    pub truth: GroundTruth,
}

pub fn read_bundle(dir: &Path) -> Result<BundleInputs, SimError> {
    let open = |name: &str| File::open(dir.join(name)).map(std::io::BufReader::new);
    Ok(BundleInputs {
        messages: ingest::parse_messages(open("messages.csv")?, &Default::default())?.records,
        regions: ingest::parse_regions(open("regions.geojson")?)?.records,
        population: ingest::parse_population(open("population.csv")?)?,
        damage: ingest::parse_damage(open("damage.csv")?)?,
        track: ingest::parse_track(open("track.csv")?)?,
        truth: parse_ground_truth(open("ground_truth.csv")?)?,
    })
}
