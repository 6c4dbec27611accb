use std::collections::BTreeMap;

use nowcast::analysis::{
    damage_by_basis, damage_correlation_report, daily_correlation_series, distances_to_track, fixture_damage,
    fixture_summaries, heatmap_matrix, nowcast, rank_keywords, Corpus, DamageBasis, DamageByBasis, KeywordScope,
    ReportCell, ReportOptions, SeriesSpan,
};
use nowcast::geo::DEFAULT_CELL_DEG;
use nowcast::ingest::{track_polyline, CountyRow};
use nowcast::metrics::ActivitySummary;
use nowcast::simulate::{generate, SimConfig};
use nowcast::{Method, Normalization, TimeWindow};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn window() -> TimeWindow {
    "2012-10-31..2012-11-12".parse().unwrap()
}

fn arb_rows() -> impl Strategy<Value = Vec<CountyRow>> {
    prop::collection::vec((1_000u64..2_000_000, 0u64..5_000, 1u64..2_000, 0.0f64..5_000.0, 0.0f64..5_000.0), 4..30)
        .prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, (population, tweets, users, ex_post, hazus))| CountyRow {
                    county: format!("C{i:02}"),
                    population,
                    tweets,
                    users,
                    ex_post_damage_musd: ex_post,
                    hazus_damage_musd: hazus,
                })
                .collect()
        })
}

fn report(rows: &[CountyRow], damage: &DamageByBasis) -> Vec<ReportCell> {
    let summaries = vec![(KeywordScope::All, fixture_summaries(rows, window()))];
    damage_correlation_report(&summaries, damage, &ReportOptions { window: window(), ..ReportOptions::default() }).unwrap()
}

fn rank_cells(cells: &[ReportCell]) -> Vec<(String, f64, f64, usize)> {
    cells
        .iter()
        .filter(|c| c.result.method != Method::Pearson)
        .map(|c| {
            let key = format!("{:?}", (c.scope, &c.keyword, c.damage_source, c.normalization, c.result.method, c.result.transform));
            (key, c.result.coefficient, c.result.p_value, c.result.n)
        })
        .collect()
}

fn same(a: &[(String, f64, f64, usize)], b: &[(String, f64, f64, usize)]) -> bool {
    let eq = |x: f64, y: f64| x == y || (x.is_nan() && y.is_nan());
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0 && eq(x.1, y.1) && eq(x.2, y.2) && x.3 == y.3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn damage_scale_leaves_rank_cells_and_nowcast(rows in arb_rows(), c in 0.01f64..100.0) {
        let damage = fixture_damage(&rows);
        let scaled: DamageByBasis = damage
            .iter()
            .map(|(b, m)| (*b, m.iter().map(|(r, v)| (r.clone(), v * c)).collect()))
            .collect();
        prop_assert!(same(&rank_cells(&report(&rows, &damage)), &rank_cells(&report(&rows, &scaled))));

        let summaries = fixture_summaries(&rows, window());
        let ex = &damage[&DamageBasis::ExPost];
        let a = nowcast(&summaries, window(), Normalization::PerCapita, KeywordScope::All, Some(ex));
        let b = nowcast(&summaries, window(), Normalization::PerCapita, KeywordScope::All, Some(&scaled[&DamageBasis::ExPost]));
        prop_assert_eq!(a.entries, b.entries);
    }

    #[test]
    fn population_scale_leaves_rank_cells(rows in arb_rows(), k in 2u64..50) {
        let damage = fixture_damage(&rows);
        let scaled: Vec<CountyRow> = rows.iter().map(|r| CountyRow { population: r.population * k, ..r.clone() }).collect();
        let a: Vec<_> = rank_cells(&report(&rows, &damage));
        let b: Vec<_> = rank_cells(&report(&scaled, &damage));
        prop_assert!(same(&a, &b));
    }

    #[test]
    fn series_is_perfect_when_damage_tracks_activity(
        counts in prop::collection::vec((1u64..500, 1_000u64..100_000), 3..25),
    ) {
        let span = SeriesSpan { first: -2, last: 3, ..SeriesSpan::default() };
        let mut daily = BTreeMap::new();
        let mut population = BTreeMap::new();
        let mut damage = BTreeMap::new();
        for (i, (m, p)) in counts.iter().enumerate() {
            let id = format!("Z{i:03}");
            population.insert(id.clone(), *p);
            damage.insert(id.clone(), *m as f64);
            for bin in span.bins() {
                let mut s = ActivitySummary::empty(id.clone(), nowcast::metrics::bin_window(bin, span.epoch, span.width), 1, Some(*p));
                s.n_messages = m * (bin + 3) as u64;
                s.n_original = s.n_messages;
                daily.insert((id.clone(), bin), s);
            }
        }
        let series = daily_correlation_series(&daily, &damage, &population, span, Normalization::PerCapita).unwrap();
        for bin in &series.bins {
            if bin.messages == 0 {
                continue;
            }
            prop_assert_eq!(bin.activity[0].coefficient, 1.0);
            prop_assert_eq!(bin.activity[1].coefficient, 1.0);
            prop_assert!((bin.activity[2].coefficient - 1.0).abs() < 1e-12);
        }
    }
}

/// Everything downstream of the corpus, rendered for comparison.
fn pipeline(bundle: &nowcast::simulate::SimBundle, shuffle: Option<u64>) -> String {
    let mut messages = bundle.messages.clone();
    let mut regions = bundle.regions.clone();
    if let Some(seed) = shuffle {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        messages.shuffle(&mut rng);
        regions.shuffle(&mut rng);
    }
    let period = bundle.config.timeline;
    let corpus = Corpus::join(&messages, &regions, DEFAULT_CELL_DEG, period, &bundle.population).unwrap();
    let damage = damage_by_basis(&bundle.damage);
    let scopes = [KeywordScope::All, KeywordScope::default_pool(), KeywordScope::keyword("sandy")];
    let summaries: Vec<_> = scopes.iter().map(|s| (s.clone(), corpus.summaries(window(), s))).collect();
    let cells = damage_correlation_report(&summaries, &damage, &ReportOptions::default()).unwrap();
    let ranked = nowcast(&summaries[0].1, window(), Normalization::PerCapita, KeywordScope::All, None);

    let distances = distances_to_track(&regions, &track_polyline(&bundle.track)).unwrap();
    let keywords: Vec<String> = corpus.keywords().into_iter().collect();
    let per_keyword = corpus.keyword_summaries(period, keywords.iter().map(String::as_str));
    let mut cities: Vec<String> = regions.iter().map(|r| r.region_id.clone()).collect();
    if let Some(seed) = shuffle {
        cities.shuffle(&mut ChaCha8Rng::seed_from_u64(seed ^ 1));
    }
    let ranking = rank_keywords(&per_keyword, &distances, &cities).unwrap();
    let mut daily = BTreeMap::new();
    for k in &keywords {
        for ((city, bin), s) in corpus.binned(SeriesSpan::default().epoch, chrono::Duration::hours(24), -3..=3, &KeywordScope::keyword(k.as_str())) {
            daily.insert((city, k.clone(), bin), s);
        }
    }
    let heat = heatmap_matrix(&daily, &distances, &keywords, -3..=3);
    format!("{cells:?}\n{ranked:?}\n{ranking:?}\n{heat:?}")
}

#[test]
fn outputs_ignore_input_order() {
    let mut config = SimConfig::with_seed(9);
    config.regions.count = 40;
    let bundle = generate(&config).unwrap();
    let reference = pipeline(&bundle, None);
    for seed in 0..4 {
        assert_eq!(pipeline(&bundle, Some(seed)), reference, "shuffle seed {seed}");
    }
}
