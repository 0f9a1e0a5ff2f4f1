use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mitbag_verify::Report;
use tempfile::TempDir;

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn verify(config: &Path, args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_verify"));
    cmd.arg(config).args(args);
    match threads {
        Some(t) => cmd.env("VERIFY_THREADS", t),
        None => cmd.env_remove("VERIFY_THREADS"),
    };
    cmd.output().unwrap()
}

fn read_report(path: &Path) -> Report {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

fn error_kind(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr);
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    v["error"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn empty_grid_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("r.json");
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"suite":"exterior","m_grid":[],"output_path":{out_path:?}}}"#),
    );
    let out = verify(&cfg, &[], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "config");
    assert!(!out_path.exists());
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), "{ not json");
    assert_eq!(verify(&cfg, &[], None).status.code(), Some(2));
    assert_eq!(
        verify(&dir.path().join("missing.json"), &[], None)
            .status
            .code(),
        Some(2)
    );

    let good = write_config(dir.path(), r#"{"suite":"exterior","output_path":"r.json"}"#);
    assert_eq!(
        verify(&good, &["--m-grid", "100,10"], None).status.code(),
        Some(2)
    );
    assert_eq!(
        verify(&good, &["--suite", "bogus"], None).status.code(),
        Some(2)
    );
    assert_eq!(verify(&good, &["--tol", "-1"], None).status.code(), Some(2));
    assert_eq!(verify(&good, &[], Some("zero")).status.code(), Some(2));
}

#[test]
fn unwritable_output_is_reported() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"suite":"exterior","output_path":"/nonexistent-dir/for/sure/r.json"}"#,
    );
    let out = verify(&cfg, &[], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_kind(&out), "io");
}

#[test]
fn exterior_suite_passes_and_writes_atomically() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("r.json");
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"suite":"exterior","output_path":{out_path:?}}}"#),
    );
    let out = verify(&cfg, &[], None);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report = read_report(&out_path);
    assert!(report.passed());
    assert!(report
        .records
        .iter()
        .any(|r| r.check_id.starts_with("exterior.agmon")));
    let names: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    assert_eq!(names.len(), 2, "leftover files: {names:?}");
}

#[test]
fn flag_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"suite":"dirac","output_path":"ignored.json"}"#,
    );
    let csv = dir.path().join("t.csv");
    let out = verify(
        &cfg,
        &[
            "--suite",
            "exterior",
            "--m-grid",
            "50,500",
            "--format",
            "csv",
            "--out",
            csv.to_str().unwrap(),
            "--tol",
            "1e-12",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let ms: std::collections::BTreeSet<&str> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap())
        .filter(|s| !s.is_empty())
        .collect();
    assert_eq!(
        ms.into_iter().collect::<Vec<_>>(),
        ["5.0000000000000000e1", "5.0000000000000000e2"]
    );
    assert!(text.lines().skip(1).all(|l| l.starts_with("exterior.")));
}

#[test]
fn reports_are_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"suite":"all","output_path":"unused.json","seed":3}"#,
    );
    let mut outputs = Vec::new();
    // Same output path each time: the report echoes the config.
    let path = dir.path().join("r.json");
    for threads in ["1", "4", "4"] {
        let out = verify(&cfg, &["--out", path.to_str().unwrap()], Some(threads));
        assert_eq!(out.status.code(), Some(1));
        outputs.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
}

#[test]
fn transverse_default_grid_reports_the_two_slow_pairs() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("r.json");
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"suite":"transverse","output_path":{out_path:?}}}"#),
    );
    let out = verify(&cfg, &[], None);
    assert_eq!(out.status.code(), Some(1));
    let report = read_report(&out_path);
    let mut failing: Vec<(String, f64, f64)> = report
        .records
        .iter()
        .filter(|r| r.asserted && !r.pass)
        .map(|r| (r.check_id.clone(), r.kappa.unwrap(), r.gauss.unwrap()))
        .collect();
    failing.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(
        failing,
        vec![
            ("transverse.expansion_constant".to_string(), -1.0, -2.0),
            ("transverse.expansion_constant".to_string(), 1.0, 2.0),
            ("transverse.expansion_slope".to_string(), -1.0, -2.0),
            ("transverse.expansion_slope".to_string(), 1.0, 2.0),
        ]
    );
    assert!(report
        .records
        .iter()
        .any(|r| r.check_id == "transverse.uniform_constant" && r.pass));
}

#[test]
fn transverse_suite_passes_off_the_slow_pairs() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("r.json");
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"suite":"transverse","curvature_grid":[[-3,-2],[0,0],[1,1],[3,2]],"output_path":{out_path:?}}}"#
        ),
    );
    assert_eq!(verify(&cfg, &[], None).status.code(), Some(0));
    let report = read_report(&out_path);
    let slopes: Vec<f64> = report
        .records
        .iter()
        .filter(|r| r.check_id == "transverse.expansion_slope")
        .map(|r| r.observed)
        .collect();
    assert_eq!(slopes.len(), 4);
    assert!(slopes.iter().all(|s| *s <= -2.9));
}

#[test]
fn seed_only_moves_the_randomized_checks() {
    let dir = TempDir::new().unwrap();
    let run = |seed: u64| {
        let path = dir.path().join(format!("s{seed}.json"));
        let cfg = write_config(
            dir.path(),
            &format!(
                r#"{{"suite":"transverse","curvature_grid":[[1,1]],"seed":{seed},"output_path":{path:?}}}"#
            ),
        );
        assert_eq!(verify(&cfg, &[], None).status.code(), Some(0));
        read_report(&path)
    };
    let (a, b) = (run(0), run(1));
    for (x, y) in a.records.iter().zip(&b.records) {
        let random = x.check_id == "transverse.minimality" || x.check_id == "transverse.pythagoras";
        if !random {
            assert_eq!(x, y);
        }
    }
    let gap = |r: &Report| {
        r.records
            .iter()
            .find(|x| x.check_id == "transverse.minimality")
            .unwrap()
            .observed
    };
    assert_ne!(gap(&a), gap(&b));
}

#[test]
fn dirac_suite_reports_the_slope_against_eta() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("r.json");
    let cfg = write_config(
        dir.path(),
        &format!(
            r#"{{"suite":"dirac","m_grid":[50,100,200,400,800,1600],"output_path":{out_path:?},"record_runtime":true}}"#
        ),
    );
    assert_eq!(verify(&cfg, &[], None).status.code(), Some(0));
    let report = read_report(&out_path);
    let slope = report
        .records
        .iter()
        .find(|r| r.check_id == "dirac.slope")
        .unwrap();
    assert!(slope.asserted && slope.pass && slope.rel_error <= 0.05);
    assert!((slope.expected + 4.17298).abs() < 1e-5);
    assert!(report
        .summary
        .fitted
        .iter()
        .any(|f| f.name == "dirac.slope"));
    let higher: Vec<_> = report
        .records
        .iter()
        .filter(|r| r.check_id.starts_with("dirac.slope_level"))
        .collect();
    assert_eq!(higher.len(), 2);
    assert!(higher.iter().all(|r| !r.asserted));
    assert!(report.records.iter().all(|r| r.runtime_s.is_some()));
}

#[test]
fn reported_only_failures_do_not_change_the_exit_status() {
    // Tightening the slope tolerance is not possible from the config, so
    // check the contract on the library side with a doctored report.
    let cfg = mitbag_verify::SuiteConfig::from_json(r#"{"suite":"robin","output_path":"x.json"}"#)
        .unwrap();
    let mut records = mitbag_verify::evaluate(&cfg).unwrap().records;
    assert!(records.iter().all(|r| r.pass));
    let drift = records
        .iter_mut()
        .find(|r| r.check_id == "robin.drift")
        .unwrap();
    assert!(!drift.asserted);
    drift.pass = false;
    assert!(Report::new(cfg.clone(), records.clone()).passed());
    let limit = records
        .iter_mut()
        .find(|r| r.check_id == "robin.limit")
        .unwrap();
    limit.pass = false;
    assert!(!Report::new(cfg, records).passed());
}
