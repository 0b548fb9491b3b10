use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussfid")).args(args).output().expect("binary runs")
}

fn run_fixtures(cmd: &str, files: &[&str], extra: &[&str]) -> Output {
    let paths: Vec<String> = files.iter().map(|f| fixture(f).to_string_lossy().into_owned()).collect();
    let mut args = vec![cmd];
    args.extend(paths.iter().map(String::as_str));
    args.extend(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key).filter(|r| r.starts_with(' ')).map(|r| r.trim().to_string()))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

#[test]
fn fidelity_vacuum_thermal() {
    let o = run_fixtures("fidelity", &["vacuum.json", "thermal1.json"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert_eq!(field(&t, "fidelity"), "0.5");
    assert_eq!(field(&t, "method"), "pure-shortcut");
}

#[test]
fn fidelity_json_report() {
    let o = run_fixtures("fidelity", &["vacuum.json", "displaced_vacuum.json"], &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["fidelity"].as_f64().unwrap() - (-1f64).exp()).abs() < 1e-12);
    assert!(v["invariants"]["delta"].is_number());
    assert!(v["buresDistance"].is_number());
}

#[test]
fn identical_files_give_one() {
    for f in ["thermal1.json", "standard_form.json", "tmsv.json"] {
        let o = run_fixtures("fidelity", &[f, f], &["--format", "json"]);
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{f}");
    }
}

#[test]
fn three_mode_generic_pair_is_unsupported() {
    let o = run_fixtures("fidelity", &["three_mode_a.json", "three_mode_b.json"], &[]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported"));
}

#[test]
fn unphysical_input_exits_3() {
    let o = run_fixtures("fidelity", &["standard_form_unphysical.json", "standard_form.json"], &[]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn parse_and_io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"gaussian\", ").unwrap();
    let o = run(&["validate", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["validate", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mode_count_mismatch_exits_2() {
    let o = run_fixtures("fidelity", &["vacuum.json", "vacuum2.json"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_reports() {
    let o = run_fixtures("validate", &["vacuum.json"], &[]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert_eq!(field(&t, "valid"), "yes");
    assert_eq!(field(&t, "spectrum"), "[0.5]");
    assert_eq!(field(&t, "purity"), "1");
    assert_eq!(field(&t, "purity residual"), "0");

    let t = stdout(&run_fixtures("validate", &["thermal1.json"], &[]));
    assert_eq!(field(&t, "spectrum"), "[1.5]");
    assert_eq!(field(&t, "purity"), "0.333333");

    let o = run_fixtures("validate", &["standard_form_unphysical.json"], &[]);
    assert_eq!(o.status.code(), Some(3));
    let t = stdout(&o);
    assert_eq!(field(&t, "valid"), "no");
    assert_eq!(field(&t, "spectrum"), "[0.43589, 0.43589]");
}

#[test]
fn spectrum_json() {
    let o = run_fixtures("spectrum", &["standard_form.json"], &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for k in v["spectrum"].as_array().unwrap() {
        assert!((k.as_f64().unwrap() - 0.75f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn sweep_is_deterministic_and_monotone() {
    let a = run_fixtures("sweep", &["sweep_thermal.json"], &[]);
    let b = run_fixtures("sweep", &["sweep_thermal.json"], &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "b,fidelity,overlap,bures,delta,gamma,lambda,status");
    assert_eq!(lines.len(), 6);
    let f: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(f[0], 1.0);
    assert!(f.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn sweep_writes_file_and_marks_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.csv");
    let o = run_fixtures("sweep", &["sweep_correlation.json"], &["--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.lines().last().unwrap().ends_with("error:unphysical"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",ok")).count(), 4);
}

#[test]
fn sweep_with_no_successful_rows_fails() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"template":{"a":{"kind":"standard-form","b1":1,"b2":1,"c":"$c","d":-0.9},
            "b":{"kind":"standard-form","b1":1,"b2":1,"c":0,"d":0}},
            "grid":[{"name":"c","start":0.9,"stop":0.95,"steps":2}],"outputs":["fidelity"]}"#,
    )
    .unwrap();
    let o = run(&["sweep", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn oracle_check_bundled_pair() {
    let o = run_fixtures("oracle-check", &["oracle_thermal_a.json", "oracle_thermal_b.json"], &["--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["deviation"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["passed"], true);
    assert_eq!(v["cutoff"], 40);
}

#[test]
fn oracle_check_identical_circuits() {
    let o = run_fixtures("oracle-check", &["oracle_thermal_b.json", "oracle_thermal_b.json"], &["--cutoff", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let t = stdout(&o);
    assert_eq!(field(&t, "closed form"), "1");
    assert_eq!(field(&t, "oracle"), "1");
    assert_eq!(field(&t, "result"), "PASS");
}

#[test]
fn oracle_check_small_cutoff_exits_6() {
    let o = run_fixtures("oracle-check", &["oracle_heavy.json", "oracle_heavy.json"], &["--cutoff", "4"]);
    assert_eq!(o.status.code(), Some(6));
    assert!(String::from_utf8_lossy(&o.stderr).contains("try --cutoff"));
}

#[test]
fn oracle_check_force_reports_failure_with_5() {
    let o = run_fixtures(
        "oracle-check",
        &["oracle_heavy.json", "oracle_thermal_a.json"],
        &["--cutoff", "6", "--force"],
    );
    assert_eq!(o.status.code(), Some(5));
    assert_eq!(field(&stdout(&o), "result"), "FAIL");
}

#[test]
fn oracle_check_needs_circuits() {
    let o = run_fixtures("oracle-check", &["vacuum.json", "thermal1.json"], &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn strict_profile_is_accepted() {
    let o = run_fixtures("fidelity", &["vacuum.json", "thermal1.json"], &["--tolerance-profile", "strict"]);
    assert_eq!(o.status.code(), Some(0));
}
