use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn mstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mstab"))
        .args(args)
        .env_remove("MSTAB_JOBS")
        .output()
        .expect("spawn mstab")
}

fn ok(args: &[&str]) -> Output {
    let out = mstab(args);
    assert!(
        out.status.success(),
        "mstab {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(args: &[&str]) -> i32 {
    mstab(args).status.code().expect("exit code")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn plateau_counts(doc: &Value) -> Vec<u64> {
    doc["plateaus"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["communities"].as_u64().unwrap())
        .collect()
}

#[test]
fn detect_path_at_unit_time_is_one_community() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p3.txt", "a b\nb c\n");
    let out = path(&dir, "p3.tsv");
    ok(&["detect", &input, "-t", "1", "-o", out.to_str().unwrap()]);
    assert_eq!(fs::read_to_string(&out).unwrap(), "a\t0\nb\t0\nc\t0\n");
    let summary = json(&path(&dir, "p3.tsv.json"));
    assert_eq!(summary["communities"], 1);
    assert!(summary["stability"].as_f64().unwrap().abs() < 1e-12);
    let manifest = &summary["manifest"];
    assert_eq!(manifest["command"], "detect");
    assert_eq!(manifest["grid"]["t"], 1.0);
    assert_eq!(manifest["input"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn detect_karate_single_time_finds_two() {
    let dir = TempDir::new().unwrap();
    let summary = path(&dir, "s.json");
    ok(&[
        "detect",
        &data("karate.txt"),
        "-t",
        "5",
        "--optimiser",
        "gso-single",
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(json(&summary)["communities"], 2);
}

#[test]
fn detect_is_deterministic() {
    let args = [
        "detect",
        &data("karate.txt"),
        "--optimiser",
        "rgso",
        "--seed",
        "11",
        "--t-max",
        "3",
        "--log-points",
        "5",
    ];
    let a = ok(&args);
    let b = ok(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}

#[test]
fn detect_with_pruning_and_refinement_covers_every_node() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "g.txt", "a b\nb c\nc a\nc d\nd e\ne f\nf d\nf g\n");
    let out = ok(&["detect", &input, "-t", "1", "--prune-leaves", "--refine"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let labels: Vec<&str> = text.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(labels, ["a", "b", "c", "d", "e", "f", "g"]);
    let community = |label: &str| text.lines().find(|l| l.starts_with(label)).unwrap().split('\t').nth(1).unwrap().to_string();
    assert_eq!(community("g"), community("f"));
}

#[test]
fn exit_codes_separate_usage_parse_domain_and_io() {
    let dir = TempDir::new().unwrap();
    let p3 = write(&dir, "p3.txt", "a b\nb c\n");
    let bad = write(&dir, "bad.txt", "a b c d\n");
    let loop_only = write(&dir, "loop.txt", "a a\n");
    assert_eq!(code(&["detect", &p3, "--no-such-flag"]), 2);
    assert_eq!(code(&["detect", &p3, "--optimiser", "lso"]), 2);
    assert_eq!(code(&["detect", &p3, "-t", "-1"]), 2);
    assert_eq!(code(&["detect", &bad, "-t", "1"]), 3);
    assert_eq!(code(&["detect", &loop_only, "-t", "1"]), 4);
    assert_eq!(code(&["linegraph", &loop_only]), 4);
    assert_eq!(code(&["detect", &path(&dir, "missing.txt").display().to_string(), "-t", "1"]), 5);
    assert_eq!(code(&["--help"]), 0);
}

#[test]
fn nmi_of_file_with_itself_is_one() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.tsv", "a\t0\nb\t0\nc\t1\nd\t1\n");
    let out = ok(&["nmi", &p, &p]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "1.000000\n");
}

#[test]
fn nmi_of_complementary_halves_is_zero() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.tsv", "a\t0\nb\t0\nc\t1\nd\t1\n");
    let b = write(&dir, "b.tsv", "c\tx\na\tx\nb\ty\nd\ty\n");
    let out = ok(&["nmi", &a, &b]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "0.000000\n");
}

#[test]
fn nmi_label_mismatch_lists_labels() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.tsv", "a\t0\nb\t1\n");
    let b = write(&dir, "b.tsv", "a\t0\nzed\t1\n");
    let out = mstab(&["nmi", &a, &b]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("only in first: b"), "{err}");
    assert!(err.contains("only in second: zed"), "{err}");
}

#[test]
fn nmi_duplicate_label_is_parse_error() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.tsv", "a\t0\na\t1\n");
    assert_eq!(code(&["nmi", &a, &a]), 3);
}

#[test]
fn football_twelve_communities_match_conferences() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "f.tsv");
    ok(&[
        "detect",
        &data("football.gml"),
        "-t",
        "0.3",
        "--optimiser",
        "gso-single",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(json(&path(&dir, "f.tsv.json"))["communities"], 12);
    let nmi = ok(&["nmi", out.to_str().unwrap(), &data("football_conferences.tsv")]);
    let v: f64 = String::from_utf8(nmi.stdout).unwrap().trim().parse().unwrap();
    assert!((v - 0.919).abs() <= 0.03, "nmi {v}");
}

#[test]
fn linegraph_of_path_is_single_edge() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p3.txt", "a b\nb c\n");
    let out = path(&dir, "lg.txt");
    ok(&["linegraph", &input, "-o", out.to_str().unwrap()]);
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1);
    let side = json(&path(&dir, "lg.txt.manifest.json"));
    assert_eq!(side["nodes"], 2);
    assert_eq!(side["edges"], 1);
}

#[test]
fn generate_rb_has_125_nodes() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "rb.txt");
    ok(&["generate", "rb", "--steps", "3", "-o", out.to_str().unwrap()]);
    let side = json(&path(&dir, "rb.txt.manifest.json"));
    assert_eq!(side["nodes"], 125);
    assert_eq!(side["manifest"]["generator"]["family"], "rb");
}

#[test]
fn generate_h_is_seeded_and_quota_exact() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.txt");
    let b = path(&dir, "b.txt");
    ok(&["generate", "h", "--seed", "7", "-o", a.to_str().unwrap()]);
    ok(&["generate", "h", "--seed", "7", "-o", b.to_str().unwrap()]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let side = json(&path(&dir, "a.txt.manifest.json"));
    assert_eq!(side["nodes"], 256);
    assert_eq!(side["edges"], 2304);
    assert_eq!(side["manifest"]["seed"], 7);
}

#[test]
fn generate_rejects_infeasible_parameters() {
    assert_eq!(code(&["generate", "h", "--z-in1", "20"]), 2);
    assert_eq!(code(&["generate", "rb", "--steps", "0"]), 2);
}

#[test]
fn sweep_csv_is_ordered_and_independent_of_jobs() {
    let dir = TempDir::new().unwrap();
    let args = |jobs: &'static str, out: &Path| -> Vec<String> {
        [
            "--jobs",
            jobs,
            "sweep",
            &data("karate.txt"),
            "--t-max",
            "10",
            "--log-points",
            "20",
            "-o",
            out.to_str().unwrap(),
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    };
    let one = path(&dir, "one.csv");
    let two = path(&dir, "two.csv");
    let a1 = args("1", &one);
    let a2 = args("2", &two);
    ok(&a1.iter().map(String::as_str).collect::<Vec<_>>());
    ok(&a2.iter().map(String::as_str).collect::<Vec<_>>());
    let csv = fs::read_to_string(&one).unwrap();
    assert_eq!(csv, fs::read_to_string(&two).unwrap());

    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,communities,stability,nmi_prev"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 4));
    assert_eq!(rows[0][3], "");
    let times: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]));

    let doc = json(&path(&dir, "one.csv.plateaus.json"));
    assert_eq!(doc["manifest"]["command"], "sweep");
    assert_eq!(doc["manifest"]["thresholds"]["nmi"], 0.99);
    assert_eq!(doc["manifest"]["thresholds"]["min_points"], 3);
    assert_eq!(doc["manifest"]["optimiser"], "gso-single");
}

#[test]
fn sweep_rb_top_plateau_has_five_communities() {
    let dir = TempDir::new().unwrap();
    let rb = path(&dir, "rb.txt");
    ok(&["generate", "rb", "-o", rb.to_str().unwrap()]);
    let csv = path(&dir, "rb.csv");
    ok(&["sweep", rb.to_str().unwrap(), "-o", csv.to_str().unwrap()]);
    let doc = json(&path(&dir, "rb.csv.plateaus.json"));
    assert_eq!(plateau_counts(&doc)[0], 5);
    assert_eq!(doc["manifest"]["grid"]["points"], 141);
}

#[test]
fn sweep_h_finds_both_levels() {
    let dir = TempDir::new().unwrap();
    let h = path(&dir, "h.txt");
    ok(&["generate", "h", "--seed", "7", "-o", h.to_str().unwrap()]);
    let plateaus = path(&dir, "h.json");
    ok(&[
        "sweep",
        h.to_str().unwrap(),
        "-o",
        path(&dir, "h.csv").to_str().unwrap(),
        "--plateaus",
        plateaus.to_str().unwrap(),
    ]);
    let counts = plateau_counts(&json(&plateaus));
    assert!(counts.contains(&4) && counts.contains(&16), "{counts:?}");
}

#[test]
fn overlap_karate_has_four_then_two_edge_communities() {
    let dir = TempDir::new().unwrap();
    let out = path(&dir, "ov.json");
    ok(&["overlap", &data("karate.txt"), "-o", out.to_str().unwrap()]);
    let doc = json(&out);
    assert_eq!(doc["line_graph"]["nodes"], 78);
    let plateaus = doc["plateaus"].as_array().unwrap();
    let span = |c: u64| {
        plateaus
            .iter()
            .find(|p| p["communities"] == c)
            .map(|p| p["time_start"].as_f64().unwrap())
            .unwrap_or_else(|| panic!("no plateau with {c} communities"))
    };
    assert!(span(4) < span(2));
    let nodes = plateaus[0]["nodes"].as_array().unwrap();
    assert_eq!(nodes.len(), 34);
    assert!(nodes.iter().all(|n| !n["communities"].as_array().unwrap().is_empty()));
}

#[test]
fn jobs_env_var_is_accepted() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "p3.txt", "a b\nb c\n");
    let out = Command::new(env!("CARGO_BIN_EXE_mstab"))
        .args(["detect", &input, "-t", "1"])
        .env("MSTAB_JOBS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}
