use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(name)
}

fn rothe(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rothe"))
        .args(args)
        .env("ROTHE_OUTPUT_DIR", out)
        .output()
        .expect("spawn rothe")
}

fn kv(text: &str, key: &str) -> Option<String> {
    text.lines().find_map(|l| {
        let (k, v) = l.split_once('=')?;
        (k.trim() == key).then(|| v.trim().to_string())
    })
}

#[test]
fn zero_data_stays_at_rest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("zero_data.toml");
    let out = rothe(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    for row in rows {
        let cols: Vec<&str> = row.split(',').collect();
        for c in &cols[2..5] {
            assert_eq!(c.parse::<f64>().unwrap(), 0.0, "{row}");
        }
    }
}

#[test]
fn manufactured_run_satisfies_half_step_identity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("manufactured.toml");
    let out = rothe(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let half_step = std::fs::read_to_string(dir.path().join("half_step.txt")).unwrap();
    let rel: f64 = kv(&half_step, "half_step_rel_diff").unwrap().parse().unwrap();
    assert!(rel <= 1e-12, "rel diff {rel}");
    assert_eq!(kv(&half_step, "half_step_bound_holds").as_deref(), Some("true"));
    for f in ["interpolants.csv", "apriori.txt", "run.log"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
}

#[test]
fn grid_reports_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("hand_grid.toml");
    let out = rothe(&["grid", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    let sigma: f64 = csv
        .lines()
        .find_map(|l| l.strip_prefix("sigma,"))
        .expect("sigma row")
        .parse()
        .unwrap();
    // steps 0.1, 0.2, 0.3
    assert!((sigma - 2.0 / 75.0).abs() < 1e-12, "sigma {sigma}");
    assert!(dir.path().join("nodes.csv").exists());
}

#[test]
fn order_study_writes_one_row_per_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("order_study.toml");
    let out = rothe(&["study", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("study.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("N,"));
    let ns: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ns, ["32", "64", "128", "256"]);
    let summary = std::fs::read_to_string(dir.path().join("study_summary.txt")).unwrap();
    assert_eq!(kv(&summary, "passed").as_deref(), Some("true"));
}

#[test]
fn malformed_config_exits_3_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "problem = \"P2\"\nbogus = 1\n").unwrap();
    let out = rothe(&["run", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");
    assert!(err.contains("bogus"), "{err}");

    std::fs::write(&bad, "problem = \n").unwrap();
    let out = rothe(&["check", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn missing_arguments_and_files_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rothe(&[], dir.path()).status.code(), Some(3));
    assert_eq!(rothe(&["frobnicate", "x.toml"], dir.path()).status.code(), Some(3));
    let missing = dir.path().join("nope.toml");
    assert_eq!(rothe(&["run", missing.to_str().unwrap()], dir.path()).status.code(), Some(3));
}

#[test]
fn output_dir_follows_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested/elsewhere");
    let cfg = config("hand_grid.toml");
    let out = rothe(&["grid", cfg.to_str().unwrap()], &target);
    assert_eq!(out.status.code(), Some(0));
    assert!(target.join("grid.csv").exists());
    let leftovers: Vec<_> = std::fs::read_dir(&target)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty());
}

#[test]
fn check_flags_smallness_violation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("smallness_violated.toml");
    let out = rothe(&["check", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("check.txt")).unwrap();
    assert!(report.contains("[smallness]"));
}
