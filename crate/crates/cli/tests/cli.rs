use std::fs;
use std::process::{Command, Output};

use exclusivity::exgraph::{ExclusivityGraph, GraphJson};
use exclusivity::scenario::{build_chsh_scenario, Scenario};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exclusivity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn verify_passes_with_exit_zero() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("S_max·R_max = 8.000000000"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn perturbed_verify_exits_one() {
    let o = run(&["verify", "--perturb-v3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
    let line = stdout(&o)
        .lines()
        .find(|l| l.starts_with("scenario invariants nc"))
        .unwrap()
        .to_string();
    assert!(
        line.contains("false") && line.contains("edge orthogonality"),
        "{line}"
    );
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        run(&["simulate", "--visibility", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["export-graph", "--which", "f4", "--format", "csv"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "--format", "dot"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn verify_json_has_stable_keys() {
    let o = run(&["verify", "--format", "json"]);
    let text = stdout(&o);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!(v["tables"]["T2"]["rows"].is_array());
    let (t, g, d) = (
        text.find("\"tables\"").unwrap(),
        text.find("\"graphs\"").unwrap(),
        text.find("\"verdicts\"").unwrap(),
    );
    assert!(t < g && g < d);
    assert_eq!(text, stdout(&run(&["verify", "--format", "json"])));
}

#[test]
fn export_graph_counts() {
    let dir = tempfile::tempdir().unwrap();
    for (which, edges) in [("f1b", 12), ("f1c", 16), ("f4", 1408)] {
        let path = dir.path().join(format!("{which}.dot"));
        let o = run(&[
            "export-graph",
            "--which",
            which,
            "--format",
            "dot",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        assert!(
            stderr(&o).contains(&format!("{edges} edges")),
            "{}",
            stderr(&o)
        );
        let g = ExclusivityGraph::from_dot(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(g.edge_count(), edges);
    }
}

#[test]
fn f4_json_labels_and_round_trip() {
    let o = run(&["export-graph", "--which", "f4", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["labels"][0], "1,1|0,0 / 0,0,1|6,7,0");
    assert_eq!(v["labels"].as_array().unwrap().len(), 64);
    let gj: GraphJson = serde_json::from_value(v["graph"].clone()).unwrap();
    let g = ExclusivityGraph::from_json(&gj).unwrap();
    let dot = stdout(&run(&["export-graph", "--which", "f4", "--format", "dot"]));
    assert_eq!(ExclusivityGraph::from_dot(&dot).unwrap(), g);
}

#[test]
fn scenario_save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chsh.json");
    let o = run(&[
        "scenario",
        "save",
        "--which",
        "chsh",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(
        Scenario::from_json_str(&text).unwrap(),
        build_chsh_scenario()
    );
    let o = run(&["scenario", "load", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("12 exclusive pairs"));
}

#[test]
fn scenario_load_reports_failed_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nc.json");
    run(&[
        "scenario",
        "save",
        "--which",
        "nc",
        "--out",
        path.to_str().unwrap(),
    ]);
    let mut v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();

    let mut dropped = v.clone();
    dropped["edges"].as_array_mut().unwrap().remove(0);
    fs::write(&path, dropped.to_string()).unwrap();
    let o = run(&["scenario", "load", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[non-edge overlap]"), "{}", stderr(&o));

    v["state"][0][0] = serde_json::json!(2.0);
    fs::write(&path, v.to_string()).unwrap();
    let o = run(&["scenario", "load", path.to_str().unwrap()]);
    assert!(stderr(&o).contains("[state norm]"), "{}", stderr(&o));

    fs::write(&path, "{\n  \"name\": \"nc\",\n  oops\n}").unwrap();
    let o = run(&["scenario", "load", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
}

#[test]
fn simulate_analytic_and_noise_limits() {
    let o = run(&[
        "simulate",
        "--shots",
        "0",
        "--visibility",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = v["outcome"]["chsh"]["total"]["value"].as_f64().unwrap();
    let r = v["outcome"]["nc"]["total"]["value"].as_f64().unwrap();
    assert!((s - (2.0 + 2f64.sqrt())).abs() < 1e-12);
    assert!((r - (8.0 - 4.0 * 2f64.sqrt())).abs() < 1e-12);

    let o = run(&[
        "simulate",
        "--visibility",
        "0",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let s = v["outcome"]["chsh"]["total"]["value"].as_f64().unwrap();
    let r = v["outcome"]["nc"]["total"]["value"].as_f64().unwrap();
    assert!((s - 2.0).abs() < 0.02, "{s}");
    assert!((r - 1.6).abs() < 0.02, "{r}");
}

#[test]
fn simulate_csv_rows() {
    let o = run(&["simulate", "--seed", "42", "--format", "csv"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "quantity,notation,estimate,stderr,ideal,noisy expectation"
    );
    // 8 + S + 8 + R + 16 W + 2 bounds.
    assert_eq!(lines.len(), 1 + 36);
    assert!(lines[1].starts_with("u0,\"1,1|0,0\","));
    assert_eq!(
        text,
        stdout(&run(&["simulate", "--seed", "42", "--format", "csv"]))
    );
}

#[test]
fn report_writes_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "report",
        "--out",
        dir.path().to_str().unwrap(),
        "--shots",
        "20000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in [
        "report.json",
        "report.txt",
        "verdicts.csv",
        "tables/T1.csv",
        "tables/T1-sim.csv",
        "tables/T3-sim.csv",
        "graphs/F4.dot",
        "graphs/F1c.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let t2 = fs::read_to_string(dir.path().join("tables/T2.csv")).unwrap();
    assert!(t2.lines().count() >= 10);
}
