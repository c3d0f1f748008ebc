use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hopsched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopsched"))
        .args(args)
        .env("NO_COLOR", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const DIAMOND: &str = r#"{
  "tasks": [
    {"id": "A", "duration": 2}, {"id": "B", "duration": 3},
    {"id": "C", "duration": 4}, {"id": "D", "duration": 1}
  ],
  "edges": [["A", "B"], ["A", "C"], ["B", "D"], ["C", "D"]]
}"#;

#[test]
fn validate_reports_optimal_makespan() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIAMOND);
    let o = hopsched(&["validate", &p]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("4 tasks, 4 edges, T_opt = 7"), "{}", stdout(&o));
}

#[test]
fn cpm_emits_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIAMOND);
    let o = hopsched(&["cpm", &p]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["t_opt"], 7.0);
    assert_eq!(doc["slack"]["B"], 1.0);
    assert_eq!(doc["earliest_start"]["D"], 6.0);
    assert_eq!(doc["latest_start"]["B"], 3.0);
    assert_eq!(doc["critical_path"], serde_json::json!(["A", "C", "D"]));
}

#[test]
fn solve_writes_schedule_with_config() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIAMOND);
    let out = dir.path().join("s.json");
    let o = hopsched(&["solve", &p, "--out", out.to_str().unwrap(), "--alpha", "0.02", "--jobs", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    for key in ["T_H = 7", "V_pre = ", "V_post = 0", "iterations = ", "converged = "] {
        assert!(text.contains(key), "missing {key:?} in {text}");
    }
    let file: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(file["makespan"], 7.0);
    assert_eq!(file["violation"], 0.0);
    assert_eq!(file["config"]["solver"]["alpha"], 0.02);
    assert_eq!(file["config"]["solver"]["execution"], "sequential");
    assert_eq!(file["config"]["energy"]["beta"], 0.01);
    let starts = &file["starts"];
    assert!(starts["D"].as_f64().unwrap() >= starts["C"].as_f64().unwrap() + 4.0);
}

#[test]
fn solve_takes_constraints_from_file_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let project = DIAMOND.replacen('{', r#"{"constraints": {"deadline": 9, "resource_max": 4},"#, 1);
    let p = write(dir.path(), "p.json", &project);
    let o = hopsched(&["solve", &p, "--print-config", "--resource-max", "6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let cfg: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(cfg["energy"]["deadline"], 9.0);
    assert_eq!(cfg["energy"]["resource_max"], 6.0);
    assert_eq!(cfg["solver"]["max_iters"], 5000);
    assert_eq!(cfg["solver"]["repair"], true);
}

#[test]
fn solve_warm_start_from_schedule_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIAMOND);
    let first = dir.path().join("a.json");
    let second = dir.path().join("b.json");
    assert!(hopsched(&["solve", &p, "--out", first.to_str().unwrap()]).status.success());
    let o = hopsched(&["solve", &p, "--init", first.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn generate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let flags = ["--tasks", "50", "--edges", "120", "--seed", "9", "--demand-min", "1", "--demand-max", "3"];
    for out in [&a, &b] {
        let mut args = vec!["generate", "--out", out.to_str().unwrap()];
        args.extend(flags);
        let o = hopsched(&args);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["tasks"].as_array().unwrap().len(), 50);
    assert_eq!(doc["edges"].as_array().unwrap().len(), 120);
    assert!(hopsched(&["validate", a.to_str().unwrap()]).status.success());
}

#[test]
fn generate_with_edge_probability_to_stdout() {
    let o = hopsched(&["generate", "--tasks", "10", "--edge-prob", "0.3", "--resource-max", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["constraints"]["resource_max"], 5.0);
}

#[test]
fn bench_writes_reproducible_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, jobs) in [(&a, "1"), (&b, "2")] {
        let o = hopsched(&[
            "bench", "--rows", "1", "--runs", "2", "--max-iters", "300", "--seed", "5", "--jobs", jobs, "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with(hopsched::harness::CSV_HEADER));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn bench_json_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = hopsched(&[
        "bench", "--rows", "1", "--runs", "1", "--max-iters", "100", "--beta-sweep", "0.01", "--format", "json",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["config"]["solver"]["max_iters"], 100);
    assert_eq!(doc["config"]["prng"], "ChaCha8Rng/seed_from_u64");
}

#[test]
fn scaling_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = hopsched(&["scaling", "--sizes", "10,20", "--seeds", "1", "--max-iters", "50", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("n_tasks,n_edges,wall_time,iterations"), "{text}");
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn domain_errors_exit_one_with_single_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"tasks": [{"id": "A", "duration": 1}, {"id": "B", "duration": 1}], "edges": [["A","B"],["B","A"]]}"#, "cycle"),
        (r#"{"tasks": [{"id": "A", "duration": 1}], "edges": [["A","Z"]]}"#, "schema"),
        (r#"{"tasks": [{"id": "A", "duration": -1}]}"#, "negative_duration"),
        ("{\"tasks\": [", "parse"),
    ];
    for (k, (text, kind)) in cases.iter().enumerate() {
        let p = write(dir.path(), &format!("p{k}.json"), text);
        for sub in ["validate", "cpm"] {
            let o = hopsched(&[sub, &p]);
            assert_eq!(o.status.code(), Some(1), "{sub} {kind}");
            let err = stderr(&o);
            assert_eq!(err.lines().count(), 1, "{err}");
            assert!(err.starts_with(&format!("error[{kind}]: ")), "{err}");
        }
    }
    let o = hopsched(&["validate", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[io]: "));
}

#[test]
fn bad_config_is_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", DIAMOND);
    let o = hopsched(&["solve", &p, "--alpha=-1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[config]: "), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["solve"][..],
        &["frobnicate"],
        &["generate", "--tasks", "5"],
        &["generate", "--tasks", "5", "--edges", "3", "--edge-prob", "0.1"],
        &["solve", "p.json", "--alpha", "fast"],
    ] {
        let o = hopsched(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!stderr(&o).contains('\x1b'), "colored output with NO_COLOR set");
    }
    assert_eq!(hopsched(&["--help"]).status.code(), Some(0));
}
