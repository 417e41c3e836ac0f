use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(f: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(f).display().to_string()
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freedom")).args(args).current_dir(dir).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn line<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines().find_map(|l| l.strip_prefix(key)).unwrap_or_else(|| panic!("no {key:?} in {text}"))
}

#[test]
fn slope_of_diagonal_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["slope", &data("diag_1_4.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(line(&s, "slopes: "), "0, -ln(2)");
    let floats: Vec<f64> = line(&s, "slopes (float): ").split(", ").map(|t| t.parse().unwrap()).collect();
    assert_eq!(floats[0], 0.0);
    assert!((floats[1] + std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn slope_of_identity_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["slope", &data("identity_3.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(line(&stdout(&o), "slopes: "), "0, 0, 0");
}

#[test]
fn slope_json_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["slope", &data("diag_1_4.json"), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["provenance"]["tool"], "freedom");
    assert_eq!(v["provenance"]["config_hash"].as_str().unwrap().len(), 64);
    assert!(v["polygon"].is_object());
}

#[test]
fn rank_cap_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["slope", &data("identity_7.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rank cap exceeded"), "{}", stderr(&o));
    // raising the cap admits it
    let o = run(dir.path(), &["slope", &data("identity_7.json"), "--rank-cap", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn freedom_examples() {
    let dir = tempfile::tempdir().unwrap();
    // closed forms: P^2 from the quotient by the witness, P1xP1 from 2 ln min S / ln H
    let cases: &[(&str, &str, f64)] = &[
        ("P2", "1:2:2", 18f64.ln() / (3.0 * 3f64.ln())),
        ("P1xP1", "1:2 ; 1:1", 2.0 * 2f64.ln() / 10f64.ln()),
        ("P1", "1:1", 1.0),
        ("P1", "1:0", 0.0),
    ];
    for (v, p, want) in cases {
        let o = run(dir.path(), &["freedom", "--variety", v, "--point", p]);
        assert_eq!(o.status.code(), Some(0), "{v} {p}: {}", stderr(&o));
        let s = stdout(&o);
        let l = line(&s, "l: ");
        let got: f64 = l.rsplit('(').next().unwrap().trim_end_matches(')').parse().unwrap();
        assert!((got - want).abs() < 1e-12, "{v} {p}: {got} vs {want}");
    }
}

#[test]
fn bad_points_and_varieties_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["freedom", "--variety", "P2", "--point", "0:0:0"][..],
        &["freedom", "--variety", "P2", "--point", "1:2"],
        &["freedom", "--variety", "P9x", "--point", "1:2"],
        &["count", "--variety", "P1", "--bounds", "10,10"],
        &["count", "--variety", "P1", "--bounds", "10", "--workers", "0"],
        &["fit", "--input", "missing.csv"],
    ] {
        let o = run(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error: "));
    }
}

#[test]
fn count_p1_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["count", "--variety", "P1", "--bounds", "5", "--out", "r"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("r/count.csv")).unwrap();
    let row: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    // (1:0), (0:1) have h = 0; the other six have l = 1
    assert_eq!(&row[..5], &["P1", "5", "8", "6", "0.75"]);
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r/count.json")).unwrap()).unwrap();
    assert_eq!(j["rows"][0]["total"], 8);
    assert_eq!(j["rows"][0]["free"], 6);
}

#[test]
fn csv_only_writes_no_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["count", "--variety", "P1", "--bounds", "5", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("count.csv").exists());
    assert!(!dir.path().join("count.json").exists());
}

#[test]
fn fit_recovers_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["fit", "--input", &data("fit_fixture.csv")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("fit.csv")).unwrap();
    let v: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|t| t.parse().unwrap()).collect();
    assert!((v[0] - 7.0).abs() < 1e-9 && (v[1] - 1.0).abs() < 1e-9 && (v[2] - 3.0).abs() < 1e-9, "{v:?}");
}

#[test]
fn fit_reads_count_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["count", "--variety", "P2", "--bounds", "10,100,1000,10000", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(dir.path(), &["fit", "--input", "count.csv", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fit.json")).unwrap()).unwrap();
    assert_eq!(j["points"].as_array().unwrap().len(), 4);
    assert!(j["caveat"].is_string());
}

#[test]
fn fiber_scan_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["fiber-scan", "--config", &data("bt_fiber.conf")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("deciles nonincreasing: true"));
    let j: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fiber.json")).unwrap()).unwrap();
    let env = j["envelope"].as_array().unwrap();
    // one entry per distinct fiber height, suffix maxima of l
    assert!(!env.is_empty() && env.len() as u64 <= j["point_count"].as_u64().unwrap());
    assert!(env.windows(2).all(|w| w[1][1].as_f64() <= w[0][1].as_f64()));
    assert_eq!(j["free_count"], 0);
    // a fiber scan takes one bound
    let o = run(dir.path(), &["fiber-scan", "--config", &data("bt_fiber.conf"), "--bounds", "10,100"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("blocker"), "").unwrap();
    let o = run(dir.path(), &["count", "--variety", "P1", "--bounds", "5", "--out", "blocker/sub"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot"));
}

#[test]
fn config_hash_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let hash = |w: &str| {
        let o = run(dir.path(), &["freedom", "--variety", "P2", "--point", "1:2:2", "--format", "json", "--workers", w]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v["provenance"]["config_hash"].clone()
    };
    assert_eq!(hash("1"), hash("3"));
}
