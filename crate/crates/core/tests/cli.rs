use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_aerosym"))
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios")
}

fn stdout_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.trim()).unwrap_or_else(|e| panic!("bad stdout {text:?}: {e}"))
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("an error line on stderr");
    serde_json::from_str(line).unwrap_or_else(|e| panic!("bad stderr {text:?}: {e}"))
}

/// Numeric fields equal within `rel`, everything else exactly.
fn assert_close(a: &Value, b: &Value, rel: f64, path: &str) {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            assert!(
                (x - y).abs() <= rel * x.abs().max(y.abs()).max(1e-300),
                "{path}: {x} vs {y}"
            );
        }
        (Value::Object(x), Value::Object(y)) => {
            assert_eq!(x.len(), y.len(), "{path}: key sets differ");
            for (k, v) in x {
                assert_close(v, &y[k], rel, &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(a, b, "{path}"),
    }
}

fn write_samples(dir: &Path, c0: f64, c1: f64) -> PathBuf {
    let mut text = String::from("alpha_deg,cd,cl\n");
    for i in 0..=18 {
        let deg = 10.0 * i as f64;
        let a = f64::to_radians(deg);
        text += &format!(
            "{deg},{},{}\n",
            c0 + 2.0 * c1 * a.sin().powi(2),
            c1 * (2.0 * a).sin()
        );
    }
    let path = dir.join(format!("samples_{c0}_{c1}.csv"));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn simulate_hover_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "simulate",
            scenarios().join("hover.json").to_str().unwrap(),
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/hover_summary.json");
    let golden: Value =
        serde_json::from_str(&std::fs::read_to_string(golden_path).unwrap()).unwrap();
    assert_close(&summary, &golden, 1e-9, "summary");
    assert_eq!(stdout_json(&out), summary);
    assert!(!dir.path().join("run.csv").exists());
}

#[test]
fn simulate_writes_csv_and_plot_script() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args([
            "simulate",
            scenarios().join("hover.json").to_str().unwrap(),
            "--csv",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let csv = std::fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5002);
    assert!(csv.starts_with("t_s,x1,x2,x3,v1,v2,v3,r11,"));
    let gp = std::fs::read_to_string(dir.path().join("run.gp")).unwrap();
    assert!(gp.contains("\"run.csv\""));
}

#[test]
fn fit_recovers_published_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    for (c0, c1, cd0) in [(0.43, 0.462, 1.354), (0.1, 11.55, 23.2)] {
        let samples = write_samples(dir.path(), c0, c1);
        let card = dir.path().join("card.json");
        let out = bin()
            .args(["fit", "--family", "sin2"])
            .arg(&samples)
            .arg("--out")
            .arg(&card)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report = stdout_json(&out);
        assert!((report["c0"].as_f64().unwrap() - c0).abs() < 1e-10);
        assert!((report["c1"].as_f64().unwrap() - c1).abs() < 1e-10);
        assert!((report["cd0"].as_f64().unwrap() - cd0).abs() < 1e-9);

        let check = bin().arg("check-equivalency").arg(&card).output().unwrap();
        assert!(check.status.success());
        let check = stdout_json(&check);
        assert!(check["defect"].as_f64().unwrap() < 1e-12);
        assert!((check["cd0"].as_f64().unwrap() - cd0).abs() < 1e-9);
    }
}

#[test]
fn fit_tan_family() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("alpha_deg,cd,cl,weight\n");
    for deg in [0.0, 5.0, 10.0, 15.0, 20.0] {
        let a: f64 = f64::to_radians(deg);
        text += &format!("{deg},0.05,{},2\n", 2.0 * a.tan());
    }
    let samples = dir.path().join("tan.csv");
    std::fs::write(&samples, text).unwrap();
    let card = dir.path().join("tan_card.json");
    let out = bin()
        .args([
            "fit",
            "--family",
            "tan",
            "--alpha-max",
            "30",
            "--k-a",
            "0.2",
        ])
        .arg(&samples)
        .arg("--out")
        .arg(&card)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert!((report["c1_bar"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let card: Value = serde_json::from_str(&std::fs::read_to_string(card).unwrap()).unwrap();
    assert_eq!(card["family"], "tan");
    assert_eq!(card["k_a"], 0.2);

    let out = bin()
        .args(["fit", "--family", "tan", "--alpha-max", "12"])
        .arg(&samples)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_equivalency_on_shipped_card() {
    let out = bin()
        .args([
            "check-equivalency",
            scenarios().join("elliptic_card.json").to_str().unwrap(),
            "--grid",
            "37",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["grid_points"], 37);
    assert!(v["defect"].as_f64().unwrap() < 1e-12);
    assert!((v["cd0"].as_f64().unwrap() - 1.354).abs() < 1e-12);
}

#[test]
fn sweep_reports_fraction() {
    let out = bin()
        .args(["sweep", scenarios().join("hover.json").to_str().unwrap()])
        .args([
            "--ic-samples",
            "2",
            "--theta-max",
            "10",
            "--seed",
            "5",
            "--speed-max",
            "0.1",
        ])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["samples"], 2);
    assert!(v["convergence_fraction"].as_f64().unwrap() >= 0.0);
}

#[test]
fn config_errors_exit_1_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let out = bin().arg("simulate").arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert_eq!(err["exit_code"], 1);

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "alpha,cd\n1,2\n").unwrap();
    let out = bin()
        .args(["fit", "--family", "sin2"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // only alpha = 0 and 180 deg: nothing identifies c1
    let samples = dir.path().join("axis.csv");
    std::fs::write(&samples, "alpha_deg,cd,cl\n0,1,0\n180,1,0\n").unwrap();
    let out = bin()
        .args(["fit", "--family", "sin2"])
        .arg(&samples)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "numerical");

    // upside down: the controller cannot choose a rotation direction
    std::fs::copy(
        scenarios().join("elliptic_card.json"),
        dir.path().join("elliptic_card.json"),
    )
    .unwrap();
    let text = std::fs::read_to_string(scenarios().join("hover.json"))
        .unwrap()
        .replace(
            r#""dt_s""#,
            r#""initial": {"attitude_rotvec_deg": [180, 0, 0]}, "dt_s""#,
        );
    let scenario = dir.path().join("flip.json");
    std::fs::write(&scenario, text).unwrap();
    let out = bin()
        .arg("simulate")
        .arg(&scenario)
        .arg("--out")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("o/summary.json").exists());
}
