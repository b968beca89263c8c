use std::fs;
use std::process::Command;

fn auction() -> Command {
    Command::new(env!("CARGO_BIN_EXE_auction"))
}

#[test]
fn preset_list_names_every_preset() {
    let out = auction().args(["preset", "list"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "single-item",
        "at-most-one",
        "exactly-one",
        "deterministic-expo",
        "bundle-alpha",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn calibrate_writes_report_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = auction()
        .args(["calibrate", "preset:single-item", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("calibrated prices"));
    assert!(report.contains("0.500000000"));
    assert!(dir.path().join("cells.csv").exists());
}

#[test]
fn runs_are_byte_reproducible() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = auction()
            .args(["calibrate", "preset:at-most-one", "--seed", "123", "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success());
        (
            fs::read(dir.path().join("cells.csv")).unwrap(),
            fs::read(dir.path().join("report.txt")).unwrap(),
        )
    };
    let (csv_a, report_a) = run();
    let (csv_b, report_b) = run();
    assert_eq!(csv_a, csv_b);
    assert_eq!(report_a, report_b);
}

#[test]
fn refuted_certification_exits_with_code_four() {
    let dir = tempfile::tempdir().unwrap();
    let out = auction()
        .args([
            "certify",
            "preset:bundle-alpha:1.05",
            "--tol",
            "0.0025",
            "--resolution",
            "48",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn config_errors_exit_with_code_two() {
    let out = auction()
        .args(["certify", "preset:not-a-preset"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[density]\nkind = \"uniform_box\"\n").unwrap();
    let out = auction().arg("certify").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn certify_accepts_a_config_file_instance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("instance.toml");
    fs::write(
        &cfg,
        r#"
[density]
kind = "uniform_box"
bounds = [1.0, 1.0]

[allocation]
vertices = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]

[menu]
shape = [[1.0, 0.0], [0.0, 1.0]]
initial_prices = [0.5, 0.5]

[solver]
calibration_resolutions = [16, 32]
certify_resolutions = [16, 32]
certify_tol_rel = 0.05
"#,
    )
    .unwrap();
    let out = auction()
        .arg("certify")
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
    let report = fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("0.577350269"), "{report}");
    assert!(dir.path().join("cells.svg").exists());
}

#[test]
fn sweep_writes_gap_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = auction()
        .args([
            "sweep",
            "--from",
            "1.3",
            "--to",
            "1.4",
            "--step",
            "0.05",
            "--resolution",
            "32",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "{csv}"); // header + three alphas
    assert!(csv.starts_with("alpha,price,revenue,dual,gap_rel,certified"));
}

#[test]
fn solve_exports_plan_and_mechanism() {
    let dir = tempfile::tempdir().unwrap();
    let out = auction()
        .args(["solve", "preset:single-item", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let plan = fs::read_to_string(dir.path().join("plan.csv")).unwrap();
    assert!(plan.lines().count() > 2);
    assert!(dir.path().join("mechanism.csv").exists());
}
