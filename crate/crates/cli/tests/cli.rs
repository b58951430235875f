use std::path::Path;
use std::process::Command;

fn gef() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gef"))
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("missing {name}: {e}"))
}

#[test]
fn variance_csv_has_one_row_per_r() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"function":"gauss-bump","r_list":[2.0,4.0,8.0]}"#).unwrap();
    let status = gef()
        .args(["variance", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(dir.path(), "variance.csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[0].starts_with("# provenance tool=gef"));
    assert_eq!(lines[1], gef::variance::VarianceReport::csv_header());
    assert_eq!(lines.len(), 5, "expected header + 3 rows:\n{csv}");
    // JSON side carries the provenance block with the resolved config.
    let json: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "variance.json")).unwrap();
    assert_eq!(json["provenance"]["tool"], "gef");
    assert_eq!(json["provenance"]["resolved_config"]["function"], "gauss-bump");
    assert_eq!(json["reports"].as_array().unwrap().len(), 3);
}

#[test]
fn malformed_config_exits_with_schema_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"function":"gauss-bump", unquoted}"#).unwrap();
    let status = gef()
        .args(["variance", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_keys_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"function":"gauss-bump","no_such_key":1}"#).unwrap();
    let status = gef()
        .args(["variance", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn unknown_test_function_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"function":"sombrero"}"#).unwrap();
    let status = gef()
        .args(["variance", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn zeros_csv_schema_and_rerun_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed":11,"count":3,"radius":4.0}"#).unwrap();
    for _ in 0..2 {
        let status = gef()
            .args(["zeros", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let csv = read(dir.path(), "zeros.csv");
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# provenance"));
    assert_eq!(lines.next().unwrap(), "sample_index,re,im,residual");

    // Re-running with a different thread count reproduces identical bytes.
    let first = csv.clone();
    let status = gef()
        .args(["zeros", "--threads", "1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(first, read(dir.path(), "zeros.csv"));
}

#[test]
fn pair_correlation_outputs_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"r_min":0.2,"r_max":1.0,"step":0.2}"#).unwrap();
    let run = || {
        let status = gef()
            .args(["pair-correlation", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
        (
            read(dir.path(), "pair_correlation.csv"),
            read(dir.path(), "pair_correlation.svg"),
        )
    };
    let (csv1, svg1) = run();
    let (csv2, svg2) = run();
    assert_eq!(csv1, csv2);
    assert_eq!(svg1, svg2);
    assert!(svg1.starts_with("<svg"));
    assert_eq!(csv1.lines().count(), 2 + 5); // provenance + header + 5 rows
}

#[test]
fn verify_subset_smoke_passes_and_report_renders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"scale":"smoke","criteria":[4,6,7]}"#).unwrap();
    let out = gef()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("criterion 04 [PASS]"));
    assert!(stdout.contains("criterion 06 [PASS]"));
    assert!(stdout.contains("criterion 07 [PASS]"));
    let status = gef().arg("report").arg("--out").arg(dir.path()).status().unwrap();
    assert!(status.success());
    let md = read(dir.path(), "report.md");
    assert!(md.contains("overall: **PASS**"));
}

#[test]
fn sample_roundtrip_serialization() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"seed":5,"count":2,"valid_radius":3.0,"tail_tolerance":1e-9,"zeros_radius":2.5}"#,
    )
    .unwrap();
    let status = gef()
        .args(["sample", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let doc: serde_json::Value = serde_json::from_str(&read(dir.path(), "samples.json")).unwrap();
    let samples = doc["samples"].as_array().unwrap();
    assert_eq!(samples.len(), 2);
    // Coefficient records are (re, im) pairs reconstructible from the seed.
    let s0: gef::sample::GefSample = serde_json::from_value(samples[0].clone()).unwrap();
    let rebuilt = gef::sample::sample_gef(
        s0.seed,
        s0.truncation_degree,
        s0.valid_radius,
        s0.tail_tolerance,
    )
    .unwrap();
    assert_eq!(s0, rebuilt);
    assert!(dir.path().join("sample_zeros.csv").exists());
}
