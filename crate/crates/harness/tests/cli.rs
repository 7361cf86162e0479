use std::fs;
use std::process::Command;

fn wrfss() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wrfss"));
    c.env_remove("CEC2010_DATA_DIR");
    c
}

#[test]
fn missing_required_flag_exits_2_with_usage() {
    let out = wrfss().args(["run", "--problem", "C01"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn presets_lists_all_pairs() {
    let out = wrfss().arg("presets").output().unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 29);
}

#[test]
fn run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = wrfss()
        .args(["run", "--problem", "C08", "--variant", "wrfssg", "--preset", "paper", "--runs", "2", "--iterations", "50"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["summary.txt", "summary.json", "manifest.json", "traces/run_000.csv", "traces/run_001.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["experiment"]["variant"], "wrfssg");
    assert_eq!(manifest["config"]["probe"]["directions"], 200);
    assert_eq!(manifest["seeds"], serde_json::json!([1, 2]));
    assert!(manifest["runs"][0]["evaluations"].as_u64().unwrap() > 0);
}

#[test]
fn config_file_run_and_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    fs::write(&cfg, "[experiment]\nproblem = \"C01\"\nvariant = \"wrfssp\"\nruns = 1\n[engine]\niterations = 20\n").unwrap();
    let status = wrfss().arg("run").arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert!(status.success());

    fs::write(&cfg, "[experiment]\nproblem = \"C01\"\nvariant = \"wrfss\"\n[engine]\nsigma = 7\n").unwrap();
    let out = wrfss().arg("run").arg("--config").arg(&cfg).arg("--out").arg(dir.path().join("o2")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma"));
}

#[test]
fn missing_data_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = wrfss()
        .env("CEC2010_DATA_DIR", dir.path())
        .args(["run", "--problem", "C01", "--runs", "1", "--iterations", "5"])
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("C01.txt"));
}

#[test]
fn table1_estimates() {
    let out = wrfss().args(["table1", "--samples", "20000", "--problems", "C01,C03"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("0.997689"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn batch_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = wrfss()
        .args(["batch", "--problems", "C01,C07", "--variants", "wrfss,wrfsse", "--runs", "2", "--iterations", "20"])
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("C07_wrfsse/summary.txt").exists());
    assert_eq!(fs::read_to_string(dir.path().join("grid.txt")).unwrap().lines().count(), 5);
}
