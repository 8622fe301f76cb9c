use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use castle_dda::record;
use castle_dda::CohortConfig;
use serde_json::Value;
use tempfile::TempDir;

fn castle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_castle-dda"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = castle(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn simulate_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a.jsonl"), tmp.path().join("b.jsonl"));
    for out in [&a, &b] {
        ok(&[
            "simulate",
            "--skill",
            "0.5",
            "--policy",
            "fixed",
            "--games",
            "1",
            "--seed",
            "7",
            "--out",
            path(out),
        ]);
    }
    let bytes = fs::read(&a).unwrap();
    assert_eq!(bytes, fs::read(&b).unwrap());
    assert_eq!(bytes.iter().filter(|&&c| c == b'\n').count(), 1);
}

#[test]
fn schemes_allocate_differently_under_pressure() {
    let tmp = TempDir::new().unwrap();
    let params = tmp.path().join("params.json");
    fs::write(
        &params,
        r#"{"tanker_hit_coeff": 0.6, "zombie_hit_coeff": 0.25, "zombie_skill_discount": 1.0}"#,
    )
    .unwrap();
    let tiers = |policy: &str| -> Vec<Value> {
        let text = ok(&[
            "simulate",
            "--skill",
            "0.3",
            "--policy",
            policy,
            "--games",
            "20",
            "--seed",
            "11",
            "--params",
            path(&params),
        ]);
        text.lines()
            .flat_map(|l| {
                let rec: Value = serde_json::from_str(l).unwrap();
                rec["levels"]
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|e| e["tier"].clone())
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let (v1, v2) = (tiers("dda-v1"), tiers("dda-v2"));
    assert!(v1.iter().any(|t| !t.is_null()));
    assert_ne!(v1, v2);
}

#[test]
fn unknown_policy_is_a_usage_error() {
    let out = castle(&["simulate", "--skill", "0.5", "--policy", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
    assert_eq!(
        castle(&["simulate", "--profile", "elite"]).status.code(),
        Some(2)
    );
    assert_eq!(castle(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_a_data_error() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("missing-dir").join("t.jsonl");
    let res = castle(&["simulate", "--skill", "0.5", "--out", path(&out)]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn bundled_cohort_writes_180_records_reproducibly() {
    let tmp = TempDir::new().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["cohort", "--out", path(&a)]);
    ok(&["cohort", "--out", path(&b)]);

    let results = record::read_results_dir(&a).unwrap();
    assert_eq!(results.games.len(), 180);
    assert_eq!(results.agents.len(), 30);
    let lines: usize = dir_contents(&a)
        .iter()
        .filter(|(name, _)| name.ends_with(".jsonl"))
        .map(|(_, bytes)| bytes.iter().filter(|&&c| c == b'\n').count())
        .sum();
    assert_eq!(lines, 180);
    assert_eq!(dir_contents(&a), dir_contents(&b));
}

#[test]
fn printed_config_round_trips() {
    let text = ok(&["cohort", "--print-config"]);
    let config: CohortConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(config, CohortConfig::default());
    assert_eq!(serde_json::to_string_pretty(&config).unwrap() + "\n", text);
}

#[test]
fn missing_count_names_the_field() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("bad.json");
    fs::write(&config, r#"{"profiles": [{"profile": "weak"}]}"#).unwrap();
    let out = castle(&[
        "cohort",
        path(&config),
        "--out",
        path(&tmp.path().join("o")),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("count"));
}

#[test]
fn single_condition_directory_cannot_be_summarized() {
    let tmp = TempDir::new().unwrap();
    let config = tmp.path().join("fixed-only.json");
    fs::write(
        &config,
        r#"{"conditions": ["fixed"], "games_per_condition": 1, "profiles": [{"profile": "weak", "count": 2}]}"#,
    )
    .unwrap();
    let out_dir = tmp.path().join("res");
    ok(&["cohort", path(&config), "--out", path(&out_dir)]);
    let out = castle(&["summarize", path(&out_dir)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("both conditions required"));
}

#[test]
fn csv_and_text_summaries_agree() {
    let tmp = TempDir::new().unwrap();
    let dir = tmp.path().join("res");
    ok(&["cohort", "--out", path(&dir), "--seed", "5"]);
    let csv = ok(&["summarize", path(&dir), "--format", "csv"]);
    let text = ok(&["summarize", path(&dir), "--format", "text"]);
    assert!(csv.starts_with("group,metric,without,with,difference\n"));

    let table = record::summary_from_csv(&csv).unwrap();
    assert_eq!(table.rows.len(), 9);
    for row in &table.rows {
        let line = text
            .lines()
            .find(|l| {
                l.starts_with(row.metric.title()) && l.contains(&capitalised(row.group.name()))
            })
            .unwrap_or_else(|| panic!("no text row for {:?} {:?}", row.group, row.metric));
        let cols: Vec<&str> = line.split_whitespace().rev().take(3).collect();
        assert_eq!(cols[2], record::format_mean(row.without));
        assert_eq!(cols[1], record::format_mean(row.with));
        assert_eq!(cols[0], record::format_difference(row.difference));
    }
}

fn capitalised(s: &str) -> String {
    let mut c = s.chars();
    c.next()
        .map(|f| f.to_uppercase().chain(c).collect())
        .unwrap_or_default()
}

#[test]
fn enumerate_tiers_cells() {
    let v1 = ok(&["enumerate-tiers", "v1"]);
    let top = v1
        .lines()
        .find(|l| l.trim_start().starts_with("100 "))
        .unwrap();
    assert!(top.trim_end().ends_with("100 T5"), "{top}");

    let v2 = ok(&["enumerate-tiers", "v2", "--format", "csv"]);
    assert!(v2.lines().any(|l| l == "100,20,35,T2"));
    assert_eq!(v2.lines().count(), 101);
    for line in v2.lines().skip(1) {
        let tier = line.rsplit(',').next().unwrap();
        assert!(["T1", "T2", "T3", "T4", "T5"].contains(&tier), "{line}");
    }
    assert_eq!(castle(&["enumerate-tiers", "v3"]).status.code(), Some(2));
}
