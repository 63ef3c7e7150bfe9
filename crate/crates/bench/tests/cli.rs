use std::process::{Command, Stdio};

fn bench() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_cbf-bench"));
    cmd.stdout(Stdio::null()).stderr(Stdio::null());
    cmd
}

/// Captures stdout.
fn captured(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_cbf-bench"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn list_shows_every_scenario() {
    let out = captured(&["list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for id in [
        "ex1-zeroing",
        "ex2-exponential",
        "sc1-graceful1",
        "sc2-graceful2-over",
        "sc2-graceful2-under",
    ] {
        assert!(text.contains(id), "{id} missing from list");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        bench().args(["run", "nope"]).status().unwrap().code(),
        Some(2)
    );
    assert_eq!(
        bench().args(["verify", "nope"]).status().unwrap().code(),
        Some(2)
    );
    assert_eq!(
        bench()
            .args(["run", "ex1-zeroing", "--bogus"])
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
    assert_eq!(bench().arg("frobnicate").status().unwrap().code(), Some(2));
    assert_eq!(
        bench()
            .args(["run", "ex1-zeroing", "--horizon", "-1"])
            .status()
            .unwrap()
            .code(),
        Some(2)
    );
}

#[test]
fn run_writes_csvs_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let status = bench()
        .args(["run", "ex2-exponential", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let summary = std::fs::read_to_string(dir.path().join("ex2-exponential_summary.txt")).unwrap();
    assert!(summary.contains("collided: true") && summary.contains("collided: false"));
    let rows = cbf_bench::parse_csv(&dir.path().join("ex2-exponential_x0_5_v0_-25.csv")).unwrap();
    let last = rows.last().unwrap();
    assert!((last.x - 1.0).abs() < 1e-6);
    assert!(last.t < 8.0);
    let rows = cbf_bench::parse_csv(&dir.path().join("ex2-exponential_x0_10_v0_-25.csv")).unwrap();
    assert_eq!(rows.len(), 8001);
}

#[test]
fn run_overrides_from_flags() {
    let dir = tempfile::tempdir().unwrap();
    let status = bench()
        .args([
            "run",
            "ex1-zeroing",
            "--x0",
            "3",
            "--horizon",
            "1",
            "--rtol",
            "1e-9",
            "--atol",
            "1e-11",
            "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let rows = cbf_bench::parse_csv(&dir.path().join("ex1-zeroing_x0_3.csv")).unwrap();
    assert_eq!(rows.len(), 1001);
    assert!(rows.iter().all(|r| r.x == 3.0 && r.xdot.is_none()));
}

#[test]
fn config_file_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.toml");
    std::fs::write(
        &cfg,
        "[ex2-exponential]\nx0 = [6.0]\nv0 = -5.0\nhorizon = 2.0\n",
    )
    .unwrap();
    let status = bench()
        .args(["run", "ex2-exponential", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let rows = cbf_bench::parse_csv(&dir.path().join("ex2-exponential_x0_6_v0_-5.csv")).unwrap();
    assert_eq!(rows.len(), 2001);
    assert_eq!(rows[0].xdot, Some(-5.0));

    std::fs::write(&cfg, "[ex2-exponential]\nspeed = 1\n").unwrap();
    let status = bench()
        .args(["run", "ex2-exponential", "--config"])
        .arg(&cfg)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn verify_exit_codes() {
    assert_eq!(
        bench()
            .args(["verify", "ex1-zeroing"])
            .status()
            .unwrap()
            .code(),
        Some(0)
    );
    assert_eq!(
        bench()
            .args(["verify", "sc1-graceful1"])
            .status()
            .unwrap()
            .code(),
        Some(0)
    );
    // the bundled overdamped peak target for x0 = 2 m is not reproduced
    let out = captured(&["verify", "sc2-graceful2-over"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("[FAIL]"));
}

#[test]
fn repeated_runs_write_identical_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        bench()
            .args(["run", "sc2-graceful2-under", "--out"])
            .arg(dir.path())
            .status()
            .unwrap();
    }
    for name in [
        "sc2-graceful2-under_x0_2_v0_-25.csv",
        "sc2-graceful2-under_x0_5_v0_-25.csv",
    ] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty() && x == y, "{name} differs");
    }
}
