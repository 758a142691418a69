use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bicrec::engine::save_state;
use bicrec::fixtures::{k3, u0_usage, u0_visits};
use bicrec::recbi::recbi1;
use bicrec::{Dataset, EngineConfig, EngineState};

fn bicrec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bicrec"))
        .args(args)
        .env_remove("BICREC_DATA_DIR")
        .env("RUST_LOG", "off")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn u0_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let catalog = k3();
    let data = Dataset {
        usage: u0_usage(&catalog),
        visits: u0_visits(),
        log: None,
        catalog,
    };
    let config = EngineConfig { data_dir: dir.path().to_path_buf(), ..EngineConfig::default() };
    save_state(&EngineState { data, config }, dir.path()).unwrap();
    dir
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn recommend_prints_a_table() {
    let dir = u0_dir();
    let d = dir.path().to_str().unwrap();
    let before = listing(dir.path());
    let out = bicrec(&["recommend", "--data-dir", d, "--user", "u0", "--seed", "f1", "--n", "5", "--mode", "recbi1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("mode: recbi1  seed: f1\n"), "{text}");
    let row: Vec<&str> = text.lines().nth(2).unwrap().split_whitespace().collect();
    assert_eq!(row, ["1", "f2", "1/3"]);
    assert_eq!(text.lines().count(), 3);
    assert_eq!(listing(dir.path()), before, "recommend must not touch the data");
}

#[test]
fn recommend_json_matches_library() {
    let dir = u0_dir();
    let out = bicrec(&[
        "recommend", "--data-dir", dir.path().to_str().unwrap(), "--user", "u0", "--seed", "f1", "--mode", "recbi1", "--json",
    ]);
    assert!(out.status.success());
    let k = k3();
    let lib = recbi1(&k, &u0_usage(&k), &u0_visits(), "u0", "f1", 5).unwrap();
    assert_eq!(stdout(&out), format!("{}\n", lib.to_json()));
    serde_json::from_str::<serde_json::Value>(&stdout(&out)).unwrap();
}

#[test]
fn data_dir_from_environment() {
    let dir = u0_dir();
    let out = Command::new(env!("CARGO_BIN_EXE_bicrec"))
        .args(["recommend", "--user", "u0", "--seed", "f1", "--mode", "recbi1", "--json"])
        .env("BICREC_DATA_DIR", dir.path())
        .env("RUST_LOG", "off")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn domain_errors_exit_1() {
    let dir = u0_dir();
    let d = dir.path().to_str().unwrap();
    let out = bicrec(&["recommend", "--data-dir", d, "--user", "u0", "--seed", "f9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("unknown faculty `f9`"));
    assert!(stdout(&out).is_empty());
    let out = bicrec(&["recommend", "--data-dir", d, "--user", "nobody", "--seed", "f1", "--mode", "recbi1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_2() {
    let dir = u0_dir();
    let d = dir.path().to_str().unwrap();
    assert_eq!(bicrec(&[]).status.code(), Some(2));
    assert_eq!(bicrec(&["recommend", "--data-dir", d, "--user", "u0", "--seed", "f1", "--bogus"]).status.code(), Some(2));
    assert_eq!(bicrec(&["recommend", "--data-dir", d, "--user", "u0", "--seed", "f1", "--mode", "best"]).status.code(), Some(2));
    fs::write(dir.path().join("visits.csv"), "user_id,visits\nu0,three\n").unwrap();
    let out = bicrec(&["validate", "--data-dir", d]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("visits.csv:2:"), "{}", stderr(&out));
}

#[test]
fn validate_names_undeclared_attribute_and_line() {
    let dir = u0_dir();
    let d = dir.path().to_str().unwrap();
    let out = bicrec(&["validate", "--data-dir", d]);
    assert!(out.status.success(), "{}", stderr(&out));
    fs::write(dir.path().join("usage.csv"), "user_id,attribute_id,weight\nu0,a1,2\nu0,a9,1\n").unwrap();
    let out = bicrec(&["validate", "--data-dir", d]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("usage.csv:3:") && err.contains("a9"), "{err}");
}

#[test]
fn validate_reports_inconsistent_history() {
    let dir = u0_dir();
    fs::write(dir.path().join("visits.csv"), "user_id,visits\n").unwrap();
    let out = bicrec(&["validate", "--data-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no recorded visits"));
}

#[test]
fn gen_is_deterministic_and_evaluable() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let gen = |out: &Path, seed: &str| {
        bicrec(&[
            "gen", "--out", out.to_str().unwrap(), "--faculties", "16", "--attributes", "12", "--users", "20",
            "--clusters", "4", "--seed", seed,
        ])
    };
    assert!(gen(a.path(), "7").status.success());
    assert!(gen(b.path(), "7").status.success());
    assert_eq!(listing(a.path()), listing(b.path()));
    let c = tempfile::tempdir().unwrap();
    gen(c.path(), "8");
    assert_ne!(listing(a.path()), listing(c.path()));

    let d = a.path().to_str().unwrap();
    assert!(bicrec(&["validate", "--data-dir", d]).status.success());
    let out = bicrec(&["eval", "--data-dir", d, "--algorithm", "recbi2_cold", "--n", "3", "--json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["algorithm"], "recbi2_cold");
    assert!(report["trials"].as_u64().unwrap() > 0);
    let out = bicrec(&["eval", "--data-dir", d, "--algorithm", "popularity", "--n", "3"]);
    assert!(stdout(&out).lines().any(|l| l.starts_with("hit_rate ")));
}
