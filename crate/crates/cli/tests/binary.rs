use std::process::Command;

fn sbp() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sbp"));
    c.env_remove(sbp_cli::RUN_STORE_ENV);
    c
}

#[test]
fn solve_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("nested/solve.json");
    let status = sbp()
        .args(["solve", "--a", "1", "--omega", "1", "--q", "1", "--p", "5", "--rmax", "12", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let record: sbp_cli::RunRecord = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(record.ok);
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert!(csv.starts_with("r,u,phi\n"));
}

#[test]
fn unconverged_solve_exits_nonzero() {
    let status = sbp().args(["solve", "--rmax", "12", "--max-iter", "1"]).output().unwrap().status;
    assert_eq!(status.code(), Some(1));
}

#[test]
fn config_errors_exit_with_usage_code() {
    let out = sbp().args(["solve", "--p", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p out of (2,6)"));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "q = 1\nq = 2\n").unwrap();
    let out = sbp().arg("solve").arg("--config").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("duplicate key `q`"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.json");
    std::fs::write(&file, r#"{"probe": "kernel_bracket", "bracket_samples": 50}"#).unwrap();
    let out = dir.path().join("probe.json");
    let status = sbp()
        .arg("probe")
        .arg("--config")
        .arg(&file)
        .args(["--set", "bracket_samples=20", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let record: sbp_cli::RunRecord = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(record.config.bracket_samples, 20);
}

#[test]
fn run_store_is_append_only() {
    let store = tempfile::tempdir().unwrap();
    for _ in 0..2 {
        let status = sbp()
            .env(sbp_cli::RUN_STORE_ENV, store.path())
            .args(["probe", "--probe", "kernel_bracket"])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut names: Vec<String> =
        std::fs::read_dir(store.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    names.sort();
    assert_eq!(names.iter().filter(|n| n.ends_with(".json")).count(), 2, "{names:?}");
    assert_eq!(names.iter().filter(|n| n.ends_with(".csv")).count(), 2);
}
