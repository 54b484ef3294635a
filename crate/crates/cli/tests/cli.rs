use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn nme(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nme"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(dir: &TempDir, command: &str, config: &str, extra: &[&str]) -> (i32, Value, PathBuf) {
    let cfg = write(dir, &format!("{command}.json"), config);
    let out = dir.path().join(format!("{command}-report.json"));
    let mut args = vec![
        command,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let output = nme(&args);
    let report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    (output.status.code().unwrap(), report, out)
}

fn without_timestamps(mut v: Value) -> Value {
    let meta = v["metadata"].as_object_mut().unwrap();
    meta.remove("started_at");
    meta.remove("finished_at");
    v
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path.with_extension("csv"))
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const DIAGONAL: &str =
    r#"{"schema":1,"problem":{"kind":"diagonal","d":1},"target":{"preset":"e1_plus_tenth_e3"}}"#;

#[test]
fn identity_solve_gives_a_tight_certificate() {
    let dir = TempDir::new().unwrap();
    let config =
        r#"{"schema":1,"problem":{"kind":"diagonal","d":0},"target":{"coeffs":[0.3,-0.1,0.02]}}"#;
    let (code, report, _) = run(&dir, "solve", config, &[]);
    assert_eq!(code, 0);
    let cert = &report["result"]["certificate"];
    assert_eq!(cert["p_final"], 1.0);
    assert!(cert["residual"].as_f64().unwrap() < 1e-14);
    assert_eq!(report["schema"], 1);
    assert_eq!(
        report["metadata"]["config_sha256"].as_str().unwrap().len(),
        64
    );
}

#[test]
fn diagonal_preset_has_an_equality_table() {
    let dir = TempDir::new().unwrap();
    let (code, report, out) = run(&dir, "solve", DIAGONAL, &[]);
    assert_eq!(code, 0);
    assert_eq!(report["pass"], true);
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["level", "x_seminorm", "bound", "ratio", "pass"]);
    assert_eq!(rows.len(), 1 + 12);
    for row in &rows[1..12] {
        let ratio: f64 = row[3].parse().unwrap();
        assert!((ratio - 1.0).abs() < 1e-9, "{row:?}");
        assert_eq!(row[4], "true");
    }
    // the top level has no y-level to compare against
    assert_eq!(rows[12][2], "");
    let names: Vec<&str> = report["deviations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["name"].as_str().unwrap())
        .collect();
    for needed in [
        "metric_tail_bound",
        "net_radius_factor",
        "case_a_threshold",
        "direction_mode",
    ] {
        assert!(names.contains(&needed), "{names:?}");
    }
}

#[test]
fn understated_constant_exits_one_with_levels() {
    let dir = TempDir::new().unwrap();
    let config = DIAGONAL.replace(r#""d":1"#, r#""d":1,"c":0.5"#);
    let cfg = write(&dir, "bad.json", &config);
    let output = nme(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(
        stderr.contains("tame bound fails at levels [0, 1, 2"),
        "{stderr}"
    );
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["pass"], false);
}

#[test]
fn corrected_mode_is_disclosed() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"schema":1,"problem":{"kind":"smoothing","lambda":0.1},
        "target":{"preset":"smooth_alternating"},"solver":{"mode":"corrected","tol_residual":1e-5}}"#;
    let (code, report, _) = run(&dir, "solve", config, &[]);
    assert_eq!(code, 0, "{report}");
    let devs = report["deviations"].as_array().unwrap();
    let mode = devs.iter().find(|d| d["name"] == "direction_mode").unwrap();
    assert_eq!(mode["value"], "corrected");
    assert!(devs.iter().any(|d| d["name"] == "convolution_spillover"));
}

#[test]
fn malformed_configs_exit_two() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [
        ("syntax.json", "{\"schema\":1,"),
        ("schema.json", r#"{"schema":9}"#),
        ("unknown.json", r#"{"schema":1,"bogus":true}"#),
        ("no_problem.json", r#"{"schema":1,"target":{"coeffs":[1]}}"#),
        ("bad_eps.json", r#"{"schema":1,"solver":{"eps":0}}"#),
    ] {
        let cfg = write(&dir, name, text);
        let output = nme(&["solve", "--config", cfg.to_str().unwrap()]);
        assert_eq!(output.status.code(), Some(2), "{name}");
    }
    assert_eq!(nme(&["solve"]).status.code(), Some(2));
    assert_eq!(
        nme(&["solve", "--config", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(nme(&["suites", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn suites_are_deterministic_modulo_timestamps() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = nme(&["suites", "--seed", "3", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let read =
        |p: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };
    let (ra, rb) = (read(&a), read(&b));
    assert_eq!(ra["metadata"]["seed"], 3);
    assert_eq!(
        serde_json::to_string(&without_timestamps(ra)).unwrap(),
        serde_json::to_string(&without_timestamps(rb)).unwrap()
    );
}

#[test]
fn suites_pass_across_seeds() {
    for seed in 0..10u64 {
        let o = nme(&["suites", "--seed", &seed.to_string()]);
        assert_eq!(o.status.code(), Some(0), "seed {seed}");
    }
}

#[test]
fn zero_slack_reports_float_failures() {
    let dir = TempDir::new().unwrap();
    let config = r#"{"schema":1,"suites":{"names":["metric_axioms"],"slack":0.0}}"#;
    let cfg = write(&dir, "zero.json", config);
    let output = nme(&["suites", "--config", cfg.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    let suite = &report["result"]["suites"][0];
    assert_eq!(suite["name"], "metric_axioms");
    assert!(suite["failures"].as_u64().unwrap() > 0);
}

#[test]
fn suite_flag_selects_suites() {
    let output = nme(&["suites", "--suite", "orbit_trichotomy", "key_inclusion"]);
    assert_eq!(output.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    let matrix = report["result"]["matrix"].as_array().unwrap();
    assert_eq!(matrix.len(), 2);
    assert_eq!(matrix[0]["suite"], "orbit_trichotomy");
}

const CHECK: &str = r#"{"schema":1,"problem":{"kind":"diagonal","d":1},
 "check":{"active":[0,1],"pitch":0.05,"bound":1.0,"u_radii":[0.8,1.6],"v_radii":[10,20],
  "s":[0.1,0.2,0.4,0.8,1.6,3.2,6.4,12.8,25.6,51.2,102.4],"kappa":1.0THETA}}"#;

#[test]
fn check_confirms_openness_and_rejects_large_rates() {
    let dir = TempDir::new().unwrap();
    let (code, report, _) = run(&dir, "check", &CHECK.replace("THETA", ""), &[]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["result"]["openness"]["theta"], 0.5);
    assert_eq!(
        report["result"]["weak_pi_surjectivity"]["verdict"],
        "consistent"
    );
    assert!(report["deviations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|d| d["name"] == "checker_resolution"));

    let (code, report, _) = run(
        &dir,
        "check",
        &CHECK.replace("THETA", r#","theta":10"#),
        &[],
    );
    assert_eq!(code, 1);
    assert_eq!(report["result"]["openness"]["verdict"], "inconsistent");
}

#[test]
fn net_covers_its_box() {
    let dir = TempDir::new().unwrap();
    let config =
        r#"{"schema":1,"net":{"profile":[1,1,1,1,1,1,1,1,1,1,1,1],"epsilon":0.05,"samples":2000}}"#;
    let (code, report, _) = run(&dir, "net", config, &[]);
    assert_eq!(code, 0);
    let r = &report["result"];
    assert_eq!(r["coverage"]["uncovered"], 0);
    assert!(r["coverage"]["worst"].as_f64().unwrap() <= r["radius"].as_f64().unwrap());

    let tiny = config
        .replace("0.05", "1e-6")
        .replace(r#""samples":2000"#, r#""samples":10,"cap":100"#);
    let (code, report, _) = run(&dir, "net", &tiny, &[]);
    assert_eq!(code, 1);
    assert!(report["result"]["error"].as_str().unwrap().contains("100"));
}
