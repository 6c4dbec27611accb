use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nowcast::geo::RegionLevel;
use nowcast::ingest::{parse_regions, write_regions};
use nowcast::report::{CORRELATION_COLUMNS, NOWCAST_COLUMNS};
use nowcast::simulate::read_bundle;
use nowcast::RegionBoundary;
use tempfile::TempDir;

fn nowcast(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nowcast")).current_dir(dir).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

/// Data rows of a report, without the `#` header.
fn rows(path: &Path) -> Vec<Vec<String>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .from_path(path)
        .unwrap()
        .records()
        .map(|r| r.unwrap().iter().map(str::to_owned).collect())
        .collect()
}

fn simulated(regions: &str) -> TempDir {
    let tmp = tempfile::tempdir().unwrap();
    let out = nowcast(tmp.path(), &["simulate", "--seed", "4", "--regions", regions, "--out", "sim"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    tmp
}

const INPUTS: [&str; 10] = [
    "--messages",
    "sim/messages.csv",
    "--regions",
    "sim/regions.geojson",
    "--population",
    "sim/population.csv",
    "--damage",
    "sim/damage.csv",
    "--track",
    "sim/track.csv",
];

#[test]
fn help_and_version_exit_zero() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&nowcast(tmp.path(), &["--help"])), 0);
    assert_eq!(code(&nowcast(tmp.path(), &["--version"])), 0);
    assert_eq!(code(&nowcast(tmp.path(), &["correlate", "--help"])), 0);
}

#[test]
fn bad_arguments_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["correlate", "--no-such-flag"][..],
        &["frobnicate"],
        &[],
        &["correlate", "--normalization", "per-acre", "--fixture"],
        &["correlate", "--window", "2012-11-12..2012-10-31", "--fixture"],
        &["series", "--normalization", "both"],
    ] {
        assert_eq!(code(&nowcast(tmp.path(), args)), 1, "{args:?}");
    }
}

#[test]
fn missing_inputs_exit_one_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nowcast(tmp.path(), &["correlate", "--messages", "m.csv"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--regions"));
    let out = nowcast(
        tmp.path(),
        &["nowcast", "--messages", "none.csv", "--regions", "none.geojson", "--population", "none.csv"],
    );
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no such file"));
}

#[test]
fn fixture_correlations_golden() {
    let tmp = tempfile::tempdir().unwrap();
    let out = nowcast(tmp.path(), &["correlate", "--fixture", "--normalization", "per-capita", "--out", "o"]);
    assert_eq!(code(&out), 0);
    let rows = rows(&tmp.path().join("o/correlations.csv"));
    assert_eq!(rows[0], CORRELATION_COLUMNS);
    let lines: Vec<String> = rows[1..7].iter().map(|r| r.join(",")).collect();
    assert_eq!(
        lines,
        [
            "activity,all,ex_post,per_capita,raw,kendall,27,0.339031,0.0131094,0",
            "activity,all,ex_post,per_capita,raw,spearman,27,0.504884,0.00723306,0",
            "activity,all,ex_post,per_capita,raw,pearson,27,0.0824727,0.682569,0",
            "activity,all,ex_post,per_capita,log10,kendall,27,0.339031,0.0131094,0",
            "activity,all,ex_post,per_capita,log10,spearman,27,0.504884,0.00723306,0",
            "activity,all,ex_post,per_capita,log10,pearson,27,0.404902,0.0361663,0",
        ]
    );
    let text = fs::read_to_string(tmp.path().join("o/correlations.csv")).unwrap();
    assert!(text.starts_with("# tool=nowcast "));
    assert!(!text.contains('\r'));
}

#[test]
fn fixture_nowcast_ranks_new_york_first() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(code(&nowcast(tmp.path(), &["nowcast", "--fixture", "--out", "o"])), 0);
    let rows = rows(&tmp.path().join("o/nowcast.csv"));
    assert_eq!(rows[0], NOWCAST_COLUMNS);
    assert_eq!(rows[1].join(","), "1,New York,0.0313553,50767,1619090");
    assert_eq!(rows.len(), 28);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = simulated("40");
    for (args, file) in [
        (&["correlate", "--overlay"][..], "correlations.csv"),
        (&["series"], "series.csv"),
        (&["nowcast"], "nowcast.csv"),
        (&["rank-keywords"], "heatmap.csv"),
        (&["summarize", "--bin-hours", "24"], "summaries.csv"),
    ] {
        let mut outputs = Vec::new();
        for (tag, threads) in [("a", "1"), ("b", "3")] {
            let dir = format!("{}_{tag}", args[0]);
            let argv = [&["--threads", threads], args, &INPUTS[..], &["--out", &dir]].concat();
            let out = nowcast(tmp.path(), &argv);
            assert_eq!(code(&out), 0, "{argv:?}: {}", String::from_utf8_lossy(&out.stderr));
            outputs.push(fs::read(tmp.path().join(&dir).join(file)).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{}", args[0]);
    }
}

#[test]
fn outputs_round_trip_through_parsers() {
    let tmp = simulated("30");
    let bundle = read_bundle(&tmp.path().join("sim")).unwrap();
    assert_eq!(bundle.regions.len(), 30);
    assert!(bundle.truth.kendall.is_some());

    let argv = [&["correlate", "--overlay"][..], &INPUTS[..8], &["--out", "o"]].concat();
    assert_eq!(code(&nowcast(tmp.path(), &argv)), 0);
    let overlay = parse_regions(fs::File::open(tmp.path().join("o/overlay.geojson")).unwrap()).unwrap();
    assert_eq!(overlay.rejected, 0);
    assert_eq!(overlay.records.len(), bundle.regions.len());
    for (a, b) in overlay.records.iter().zip(&bundle.regions) {
        assert_eq!((&a.region_id, a.level), (&b.region_id, b.level));
        assert!(a.rings().eq(b.rings()));
    }
    for r in &overlay.records {
        for key in ["activity_pc", "damage_pc", "rank_discrepancy"] {
            assert!(r.properties.contains_key(key), "{} lacks {key}", r.region_id);
        }
    }

    let argv = [&["join"][..], &INPUTS[..4], &["--out", "j"]].concat();
    assert_eq!(code(&nowcast(tmp.path(), &argv)), 0);
    let assigned = rows(&tmp.path().join("j/assignments.csv"));
    assert_eq!(assigned.len() - 1, bundle.messages.len());
    for (row, m) in assigned[1..].iter().zip(&bundle.messages) {
        assert_eq!(row[0], m.message_id);
        assert!(m.message_id.starts_with(&row[1]));
    }
}

#[test]
fn mixed_levels_need_a_level() {
    let tmp = tempfile::tempdir().unwrap();
    let regions = [
        RegionBoundary::rectangle("C1", RegionLevel::County, [-75.0, 40.0], [-74.0, 41.0]),
        RegionBoundary::rectangle("Z1", RegionLevel::Zcta, [-75.0, 40.0], [-74.5, 40.5]),
    ];
    write_regions(fs::File::create(tmp.path().join("r.geojson")).unwrap(), &regions).unwrap();
    fs::write(
        tmp.path().join("m.csv"),
        "message_id,user_id,timestamp,lat,lon,keywords,is_retweet,retweeted_count,sentiment\n\
         a,u1,2012-11-01T10:00:00Z,40.2,-74.8,sandy,0,0,\n",
    )
    .unwrap();
    let base = ["join", "--messages", "m.csv", "--regions", "r.geojson", "--out", "o"];
    let out = nowcast(tmp.path(), &base);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--level"));
    for (level, region) in [("county", "C1"), ("zcta", "Z1")] {
        let out = nowcast(tmp.path(), &[&base[..], &["--level", level]].concat());
        assert_eq!(code(&out), 0);
        assert_eq!(rows(&tmp.path().join("o/assignments.csv"))[1], ["a", region]);
    }
}

#[test]
fn degenerate_only_output_exits_two() {
    let tmp = simulated("20");
    let argv = [&["nowcast", "--window", "2013-01-01..2013-01-05"][..], &INPUTS[..6], &["--out", "o"]].concat();
    let out = nowcast(tmp.path(), &argv);
    assert_eq!(code(&out), 2);
    assert_eq!(rows(&tmp.path().join("o/nowcast.csv")).len(), 1);
    let excluded = rows(&tmp.path().join("o/nowcast_excluded.csv"));
    assert_eq!(excluded.len(), 21);
    assert!(excluded[1..].iter().all(|r| r[1] == "inactive"));
}

#[test]
fn simulate_config_file_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("c.json"), r#"{"seed": 8, "regions": {"count": 12}, "media_burst": 0.001}"#).unwrap();
    assert_eq!(code(&nowcast(tmp.path(), &["simulate", "--config", "c.json", "--out", "a"])), 0);
    assert_eq!(code(&nowcast(tmp.path(), &["simulate", "--seed", "8", "--regions", "12", "--media-burst", "0.001", "--out", "b"])), 0);
    for f in ["messages.csv", "damage.csv", "ground_truth.csv", "config.json"] {
        assert_eq!(fs::read(tmp.path().join("a").join(f)).unwrap(), fs::read(tmp.path().join("b").join(f)).unwrap(), "{f}");
    }
    fs::write(tmp.path().join("bad.json"), r#"{"sead": 8}"#).unwrap();
    assert_eq!(code(&nowcast(tmp.path(), &["simulate", "--config", "bad.json", "--out", "c"])), 1);
}
