use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use chrono::{DateTime, Duration, Utc};
use nowcast::analysis::{
    activity_distance_curve, damage_by_basis, damage_correlation_report, daily_correlation_series, default_city_subset,
    distances_to_track, fixture_damage, fixture_summaries, heatmap_matrix, nowcast as rank_regions, per_capita_damage,
    rank_keywords, Corpus, DamageBasis, DamageByBasis, KeywordScope, ReportOptions, SeriesSpan,
};
use nowcast::ingest::{
    self, geocode_missing, parse_damage, parse_gazetteer, parse_messages, parse_population, parse_regions, parse_track,
    sandy_counties, track_polyline, Parsed, PopulationTable,
};
use nowcast::metrics::{bin_index, normalized_activity, ActivitySummary};
use nowcast::report::{self, fmt_sig, Header};
use nowcast::simulate::{generate, SimConfig};
use nowcast::{MessageRecord, RegionBoundary, TimeWindow};

use crate::args::*;
use crate::config::*;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Done,
    /// Every statistic in the output is degenerate.
    DegenerateOnly,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn note_diagnostics<T>(path: &Path, parsed: &Parsed<T>) {
    if parsed.rejected > 0 || !parsed.diagnostics.is_empty() {
        eprintln!(
            "{}: {} rows, {} rejected, {} diagnostics",
            path.display(),
            parsed.rows,
            parsed.rejected,
            parsed.diagnostics.len()
        );
    }
}

fn in_context<T, E: std::fmt::Display>(path: &Path, r: std::result::Result<T, E>) -> Result<T> {
    r.map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_messages(cfg: &RunConfig) -> Result<Vec<MessageRecord>> {
    let path = cfg.path(Input::Messages).expect("validated");
    let parsed = in_context(path, parse_messages(open(path)?, &BTreeSet::new()))?;
    note_diagnostics(path, &parsed);
    let mut messages = parsed.records;
    if let Some(g) = &cfg.gazetteer {
        let gazetteer = in_context(g, parse_gazetteer(open(g)?))?;
        geocode_missing(&mut messages, &gazetteer);
    }
    Ok(messages)
}

fn load_regions(cfg: &RunConfig) -> Result<Vec<RegionBoundary>> {
    let path = cfg.path(Input::Regions).expect("validated");
    let parsed = in_context(path, parse_regions(open(path)?))?;
    note_diagnostics(path, &parsed);
    let mut regions = parsed.records;
    match cfg.level {
        Some(level) => regions.retain(|r| r.level == level),
        None => {
            let levels: BTreeSet<String> = regions.iter().map(|r| r.level.to_string()).collect();
            if levels.len() > 1 {
                return Err(InputError(format!(
                    "{}: mixes levels {}; pick one with --level",
                    path.display(),
                    levels.into_iter().collect::<Vec<_>>().join(", ")
                )));
            }
        }
    }
    if regions.is_empty() {
        return Err(InputError(format!("{}: no usable regions", path.display())));
    }
    Ok(regions)
}

fn load_population(cfg: &RunConfig) -> Result<PopulationTable> {
    match cfg.path(Input::Population) {
        Some(p) => in_context(p, parse_population(open(p)?)),
        None => Ok(PopulationTable::new()),
    }
}

fn load_damage(cfg: &RunConfig) -> Result<DamageByBasis> {
    let p = cfg.path(Input::Damage).expect("validated");
    Ok(damage_by_basis(&in_context(p, parse_damage(open(p)?))?))
}

fn days_of(span: TimeWindow, epoch: DateTime<Utc>, width: Duration) -> (i64, i64) {
    (bin_index(span.start, epoch, width), bin_index(span.end - Duration::nanoseconds(1), epoch, width))
}

fn iso(t: DateTime<Utc>) -> String {
    t.format("%Y-%m-%dT%H:%M:%SZ").to_string()
}

fn csv_writer<W: Write>(mut sink: W, header: &Header, columns: &[&str]) -> Result<csv::Writer<W>> {
    for (k, v) in header {
        writeln!(sink, "# {k}={v}")?;
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(sink);
    w.write_record(columns).map_err(|e| InputError(e.to_string()))?;
    Ok(w)
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_sig).unwrap_or_else(|| "NA".into())
}

pub fn validate(args: ValidateArgs) -> Result<Outcome> {
    let cfg = RunConfig::new("validate", &args.inputs, Path::new("."))?;
    cfg.validate(&[])?;
    let mut any = false;
    let report = |path: &Path, kind: &str, rows: usize, rejected: usize, diagnostics: &[ingest::Diagnostic]| {
        println!("{}: {kind}, {rows} rows, {} accepted, {rejected} rejected", path.display(), rows - rejected);
        for d in diagnostics.iter().take(20) {
            println!("  {d}");
        }
        if diagnostics.len() > 20 {
            println!("  ... {} more", diagnostics.len() - 20);
        }
    };
    if let Some(p) = cfg.path(Input::Messages) {
        let m = in_context(p, parse_messages(open(p)?, &BTreeSet::new()))?;
        report(p, "messages", m.rows, m.rejected, &m.diagnostics);
        any = true;
    }
    if let Some(p) = cfg.path(Input::Regions) {
        let r = in_context(p, parse_regions(open(p)?))?;
        report(p, "regions", r.rows, r.rejected, &r.diagnostics);
        any = true;
    }
    if let Some(p) = cfg.path(Input::Population) {
        let t = in_context(p, parse_population(open(p)?))?;
        println!("{}: population, {} regions", p.display(), t.len());
        any = true;
    }
    if let Some(p) = cfg.path(Input::Damage) {
        let t = in_context(p, parse_damage(open(p)?))?;
        println!("{}: damage, {} regions", p.display(), t.regions().count());
        any = true;
    }
    if let Some(p) = cfg.path(Input::Track) {
        let t = in_context(p, parse_track(open(p)?))?;
        println!("{}: track, {} points", p.display(), t.len());
        any = true;
    }
    if let Some(p) = &cfg.gazetteer {
        let g = in_context(p, parse_gazetteer(open(p)?))?;
        println!("{}: gazetteer, {} entries", p.display(), g.len());
        any = true;
    }
    if !any {
        return Err(InputError("validate: no input files given".into()));
    }
    Ok(Outcome::Done)
}

pub fn join(args: JoinArgs) -> Result<Outcome> {
    let cfg = RunConfig::new("join", &args.inputs, &args.out)?;
    cfg.validate(&[Input::Messages, Input::Regions])?;
    let messages = load_messages(&cfg)?;
    let regions = load_regions(&cfg)?;
    let index = nowcast::SpatialIndex::build(&regions, cfg.cell_size)?;
    let assignment = nowcast::analysis::assign_messages(&messages, &regions, &index);
    let mut w = csv_writer(create(&cfg.out, "assignments.csv")?, &cfg.header(), &["message_id", "region_id"])?;
    let mut matched = 0;
    for (m, a) in messages.iter().zip(&assignment) {
        let id = a.map(|i| regions[i].region_id.as_str()).unwrap_or("");
        matched += usize::from(a.is_some());
        w.write_record([m.message_id.as_str(), id]).map_err(|e| InputError(e.to_string()))?;
    }
    w.flush()?;
    eprintln!("{matched} of {} messages assigned", messages.len());
    Ok(Outcome::Done)
}

const SUMMARY_COLUMNS: [&str; 13] = [
    "keyword",
    "region_id",
    "window_start",
    "window_end",
    "n_messages",
    "n_original",
    "n_retweets",
    "n_popular",
    "active_users_window",
    "active_users_period",
    "mean_sentiment",
    "n_scored",
    "population",
];

fn summary_row(label: &str, s: &ActivitySummary) -> Vec<String> {
    vec![
        label.to_owned(),
        s.region_id.clone(),
        iso(s.window.start),
        iso(s.window.end),
        s.n_messages.to_string(),
        s.n_original.to_string(),
        s.n_retweets.to_string(),
        s.n_popular.to_string(),
        s.active_users_window.to_string(),
        s.active_users_period.to_string(),
        opt(s.mean_sentiment),
        s.n_scored.to_string(),
        s.population.map(|p| p.to_string()).unwrap_or_else(|| "NA".into()),
    ]
}

pub fn summarize(args: SummarizeArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("summarize", &args.inputs, &args.out)?;
    if let Some(w) = &args.window {
        cfg.window = parse_window(w, "--window")?;
    }
    cfg.span = cfg.window;
    cfg.epoch = parse_epoch(&args.epoch)?;
    if let Some(h) = args.bin_hours {
        cfg.bin_width = Duration::hours(h);
    }
    cfg.keywords = keyword_scopes(&args.selection);
    if args.selection.keywords.is_none() {
        cfg.keywords = vec![KeywordScope::All];
    }
    cfg.extra.push(("binned".into(), args.bin_hours.is_some().to_string()));
    cfg.validate(&[Input::Messages, Input::Regions])?;
    let messages = load_messages(&cfg)?;
    let regions = load_regions(&cfg)?;
    let population = load_population(&cfg)?;
    let corpus = Corpus::join(&messages, &regions, cfg.cell_size, cfg.period, &population)?;
    let mut w = csv_writer(create(&cfg.out, "summaries.csv")?, &cfg.header(), &SUMMARY_COLUMNS)?;
    for scope in &cfg.keywords {
        let label = scope.label();
        if args.bin_hours.is_some() {
            let (first, last) = days_of(cfg.window, cfg.epoch, cfg.bin_width);
            for s in corpus.binned(cfg.epoch, cfg.bin_width, first..=last, scope).values() {
                w.write_record(summary_row(&label, s)).map_err(|e| InputError(e.to_string()))?;
            }
        } else {
            for s in corpus.summaries(cfg.window, scope).values() {
                w.write_record(summary_row(&label, s)).map_err(|e| InputError(e.to_string()))?;
            }
        }
    }
    w.flush()?;
    Ok(Outcome::Done)
}

pub fn rank(args: RankArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("rank-keywords", &args.inputs, &args.out)?;
    cfg.span = parse_window(&args.span, "--span")?;
    cfg.epoch = parse_epoch(&args.epoch)?;
    cfg.normalizations = vec![nowcast::Normalization::PerPeriodUser];
    cfg.cities = args
        .cities
        .as_deref()
        .map(|c| c.split(',').map(|s| s.trim().to_owned()).filter(|s| !s.is_empty()).collect());
    cfg.validate(&[Input::Messages, Input::Regions, Input::Track])?;
    let messages = load_messages(&cfg)?;
    let regions = load_regions(&cfg)?;
    let track_path = cfg.path(Input::Track).expect("validated");
    let track = in_context(track_path, parse_track(open(track_path)?))?;
    let distances = distances_to_track(&regions, &track_polyline(&track))?;
    let cities = cfg.cities.clone().unwrap_or_else(|| default_city_subset(&regions));
    let corpus = Corpus::join(&messages, &regions, cfg.cell_size, cfg.period, &BTreeMap::new())?;
    let keywords: Vec<String> = corpus.keywords().into_iter().collect();
    let header = cfg.header();

    let summaries = corpus.keyword_summaries(cfg.period, keywords.iter().map(String::as_str));
    let ranking = rank_keywords(&summaries, &distances, &cities)?;
    let mut w = csv_writer(
        create(&cfg.out, "keyword_ranking.csv")?,
        &header,
        &["rank", "keyword", "kendall", "kendall_p", "spearman", "spearman_p", "active_cities", "degenerate"],
    )?;
    for (i, e) in ranking.entries.iter().enumerate() {
        w.write_record([
            (i + 1).to_string(),
            e.keyword.clone(),
            fmt_sig(e.kendall.coefficient),
            fmt_sig(e.kendall.p_value),
            fmt_sig(e.spearman.coefficient),
            fmt_sig(e.spearman.p_value),
            e.active_cities.to_string(),
            e.degenerate.to_string(),
        ])
        .map_err(|e| InputError(e.to_string()))?;
    }
    w.flush()?;

    let subset: BTreeSet<&str> = cities.iter().map(String::as_str).collect();
    let mut w = csv_writer(
        create(&cfg.out, "curves.csv")?,
        &header,
        &["keyword", "city", "distance_km", "activity", "retweet_fraction", "popularity"],
    )?;
    for k in &keywords {
        let curve = activity_distance_curve(&summaries, &distances, k);
        for p in curve.points.iter().filter(|p| subset.contains(p.city.as_str())) {
            w.write_record([
                k.clone(),
                p.city.clone(),
                fmt_sig(p.distance_km),
                fmt_sig(p.activity),
                opt(p.retweet_fraction),
                opt(p.popularity),
            ])
            .map_err(|e| InputError(e.to_string()))?;
        }
    }
    w.flush()?;

    let (first, last) = days_of(cfg.span, cfg.epoch, cfg.bin_width);
    let mut daily = BTreeMap::new();
    for k in &keywords {
        for ((city, bin), s) in corpus.binned(cfg.epoch, cfg.bin_width, first..=last, &KeywordScope::keyword(k.as_str())) {
            if subset.contains(city.as_str()) {
                daily.insert((city, k.clone(), bin), s);
            }
        }
    }
    let heat = heatmap_matrix(&daily, &distances, &keywords, first..=last);
    let mut w = csv_writer(create(&cfg.out, "heatmap.csv")?, &header, &["city", "keyword", "bin_start", "activity"])?;
    for (ci, city) in heat.cities.iter().enumerate() {
        for (ki, k) in heat.keywords.iter().enumerate() {
            for (bi, b) in heat.bins.iter().enumerate() {
                let start = nowcast::metrics::bin_window(*b, cfg.epoch, cfg.bin_width).start;
                w.write_record([city.clone(), k.clone(), iso(start), fmt_sig(heat.get(ci, ki, bi))])
                    .map_err(|e| InputError(e.to_string()))?;
            }
        }
    }
    w.flush()?;
    Ok(if ranking.entries.iter().all(|e| e.degenerate) { Outcome::DegenerateOnly } else { Outcome::Done })
}

/// Adds one scope per corpus keyword when `All` is combined with
/// `--per-keyword`.
fn expand_scopes(scopes: &[KeywordScope], per_keyword: bool, corpus: &Corpus) -> Vec<KeywordScope> {
    let mut out = scopes.to_vec();
    if per_keyword && scopes == [KeywordScope::All] {
        out.extend(corpus.keywords().into_iter().map(KeywordScope::Keyword));
    }
    out
}

pub fn correlate(args: CorrelateArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("correlate", &args.inputs, &args.out)?;
    cfg.window = parse_window(&args.window, "--window")?;
    cfg.normalizations = normalizations(args.normalization);
    cfg.transforms = transforms(args.transform);
    cfg.keywords = keyword_scopes(&args.selection);
    cfg.extra.push(("fixture".into(), args.fixture.to_string()));
    cfg.extra.push(("original_only".into(), args.original_only.to_string()));
    cfg.extra.push(("sentiment".into(), (!args.no_sentiment).to_string()));
    let options = ReportOptions {
        window: cfg.window,
        normalizations: cfg.normalizations.clone(),
        transforms: cfg.transforms.clone(),
        original_only: args.original_only,
        include_sentiment: !args.no_sentiment,
        ..ReportOptions::default()
    };

    let messages;
    let (summaries, damage, regions) = if args.fixture {
        cfg.keywords = vec![KeywordScope::All];
        cfg.validate(&[])?;
        let rows = sandy_counties();
        (vec![(KeywordScope::All, fixture_summaries(&rows, cfg.window))], fixture_damage(&rows), None)
    } else {
        cfg.validate(&[Input::Messages, Input::Regions, Input::Population, Input::Damage])?;
        messages = load_messages(&cfg)?;
        let regions = load_regions(&cfg)?;
        let population = load_population(&cfg)?;
        let damage = load_damage(&cfg)?;
        let corpus = Corpus::join(&messages, &regions, cfg.cell_size, cfg.period, &population)?;
        cfg.keywords = expand_scopes(&cfg.keywords, args.selection.per_keyword, &corpus);
        let summaries = cfg.keywords.iter().map(|k| (k.clone(), corpus.summaries(cfg.window, k))).collect();
        (summaries, damage, Some(regions))
    };
    let cells = damage_correlation_report(&summaries, &damage, &options)?;
    let header = cfg.header();
    report::write_correlations(create(&cfg.out, "correlations.csv")?, &header, &cells)?;

    if args.overlay {
        let Some(regions) = regions else {
            return Err(InputError("--overlay needs --regions (not available with --fixture)".into()));
        };
        let first = &summaries[0].1;
        let activity: BTreeMap<String, f64> = first
            .iter()
            .filter_map(|(r, s)| normalized_activity(s, nowcast::Normalization::PerCapita, args.original_only).map(|a| (r.clone(), a)))
            .collect();
        let population: BTreeMap<String, u64> =
            first.iter().filter_map(|(r, s)| s.population.map(|p| (r.clone(), p))).collect();
        let basis = if damage.contains_key(&DamageBasis::ExPost) { Some(DamageBasis::ExPost) } else { damage.keys().next().copied() };
        let damage_pc = basis.map(|b| per_capita_damage(&damage[&b], &population)).unwrap_or_default();
        report::write_overlay(create(&cfg.out, "overlay.geojson")?, &regions, &activity, &damage_pc)?;
    }
    Ok(if cells.iter().all(|c| c.result.is_degenerate()) { Outcome::DegenerateOnly } else { Outcome::Done })
}

pub fn series(args: SeriesArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("series", &args.inputs, &args.out)?;
    cfg.span = parse_window(&args.span, "--span")?;
    cfg.epoch = parse_epoch(&args.epoch)?;
    cfg.bin_width = Duration::hours(args.bin_hours);
    let normalization = single_normalization(args.normalization)?;
    cfg.normalizations = vec![normalization];
    cfg.keywords = keyword_scopes(&args.selection)[..1].to_vec();
    let basis: DamageBasis = args.damage_source.parse().map_err(|e| InputError(format!("--damage-source: {e}")))?;
    cfg.extra.push(("damage_source".into(), basis.to_string()));
    cfg.validate(&[Input::Messages, Input::Regions, Input::Population, Input::Damage])?;
    let messages = load_messages(&cfg)?;
    let regions = load_regions(&cfg)?;
    let population = load_population(&cfg)?;
    let damage = load_damage(&cfg)?;
    let loss = damage
        .get(&basis)
        .ok_or_else(|| InputError(format!("--damage-source: no {basis} records in the damage table")))?;
    let corpus = Corpus::join(&messages, &regions, cfg.cell_size, cfg.period, &population)?;
    let (first, last) = days_of(cfg.span, cfg.epoch, cfg.bin_width);
    let span = SeriesSpan { epoch: cfg.epoch, width: cfg.bin_width, first, last };
    let daily = corpus.binned(cfg.epoch, cfg.bin_width, span.bins(), &cfg.keywords[0]);
    let s = daily_correlation_series(&daily, loss, &population, span, normalization)?;
    report::write_series(create(&cfg.out, "series.csv")?, &cfg.header(), &s)?;
    let all_degenerate = s.bins.iter().all(|b| b.activity.iter().chain(&b.sentiment).all(|r| r.is_degenerate()));
    Ok(if all_degenerate { Outcome::DegenerateOnly } else { Outcome::Done })
}

pub fn nowcast(args: NowcastArgs) -> Result<Outcome> {
    let mut cfg = RunConfig::new("nowcast", &args.inputs, &args.out)?;
    cfg.window = parse_window(&args.window, "--window")?;
    let normalization = single_normalization(args.normalization)?;
    cfg.normalizations = vec![normalization];
    cfg.keywords = keyword_scopes(&args.selection)[..1].to_vec();
    cfg.extra.push(("fixture".into(), args.fixture.to_string()));
    let messages;
    let summaries = if args.fixture {
        cfg.keywords = vec![KeywordScope::All];
        cfg.validate(&[])?;
        fixture_summaries(&sandy_counties(), cfg.window)
    } else {
        cfg.validate(&[Input::Messages, Input::Regions, Input::Population])?;
        messages = load_messages(&cfg)?;
        let regions = load_regions(&cfg)?;
        let population = load_population(&cfg)?;
        let corpus = Corpus::join(&messages, &regions, cfg.cell_size, cfg.period, &population)?;
        corpus.summaries(cfg.window, &cfg.keywords[0])
    };
    let r = rank_regions(&summaries, cfg.window, normalization, cfg.keywords[0].clone(), None);
    for d in &r.diagnostics {
        eprintln!("{d}");
    }
    let header = cfg.header();
    report::write_nowcast(create(&cfg.out, "nowcast.csv")?, &header, &r)?;
    report::write_exclusions(create(&cfg.out, "nowcast_excluded.csv")?, &header, &r)?;
    Ok(if r.entries.is_empty() { Outcome::DegenerateOnly } else { Outcome::Done })
}

pub fn simulate(args: SimulateArgs) -> Result<Outcome> {
    let mut config = match &args.config {
        Some(p) => in_context(p, serde_json::from_reader::<_, SimConfig>(open(p)?))?,
        None => SimConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(n) = args.regions {
        config.regions.count = n;
    }
    if let Some(b) = args.media_burst {
        config.media_burst = b;
    }
    if let Some(s) = args.sigma {
        config.damage.sigma = s;
    }
    let bundle = generate(&config)?;
    bundle.write_to(&args.out)?;
    eprintln!(
        "{} regions, {} messages written to {}",
        bundle.regions.len(),
        bundle.messages.len(),
        args.out.display()
    );
    Ok(Outcome::Done)
}
