//! The `axis` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn axis(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_axis")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn defect(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/defects").join(name).display().to_string()
}

#[test]
fn validate_accepts_library_skills_and_rejects_defects() {
    let good = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/skills/insert_header_footer.json");
    let out = axis(&["validate", good.to_str().unwrap(), "--seed", "empty"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).ends_with("PASS\n"));

    let out = axis(&["validate", &defect("undeclared_param_ref.skill"), "--out", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["passed"], false);
    assert_eq!(v["static"][0]["rule"], "UndeclaredParamRef");
}

#[test]
fn run_task_text_and_json_agree() {
    let text = axis(&["run-task", "t_us5", "--policy", "ui_only"]);
    let v = json(&axis(&["run-task", "t_us5", "--policy", "ui_only", "--out", "json"]));
    let line = String::from_utf8_lossy(&text.stdout);
    assert!(line.contains(&format!("in {} step(s)", v["steps"])), "{line}");
    assert_eq!(v["success"], true);
}

#[test]
fn bench_reports_both_policies() {
    let v = json(&axis(&["bench", "--out", "json"]));
    let policies: Vec<_> = v["rows"].as_array().unwrap().iter().map(|r| r["policy"].as_str().unwrap().to_string()).collect();
    assert_eq!(policies, ["api_first", "ui_only"]);
    assert_eq!(v["runs"].as_array().unwrap().len(), 40);
}

#[test]
fn analyze_ui_with_and_without_coverage_file() {
    let derived = json(&axis(&["analyze-ui", "--out", "json"]));
    let cov = Path::new(env!("CARGO_MANIFEST_DIR")).join("assets/trees/home_tab_coverage.json");
    let filed = json(&axis(&["analyze-ui", "--coverage", cov.to_str().unwrap(), "--out", "json"]));
    assert_eq!(filed["non_essential_roots"], serde_json::json!(["2-2"]));
    assert!(derived["stats"]["prunable"].as_u64() >= filed["stats"]["prunable"].as_u64());
}

#[test]
fn explore_writes_a_loadable_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = axis(&[
        "explore",
        "--mode",
        "both",
        "--max-steps",
        "20",
        "--seeds",
        "canonical",
        "--skills-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lib = axis::skill::SkillRegistry::load(dir.path()).unwrap();
    assert!(lib.get("insert_header_footer").is_some());
    // The saved library drives later commands.
    let v = json(&axis(&["run-task", "t_us2", "--skills-dir", dir.path().to_str().unwrap(), "--out", "json"]));
    assert_eq!(v["success"], true);
}

#[test]
fn usage_errors() {
    let out = axis(&["run-task", "no_such_task", "--out", "json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(json(&out)["error"].as_str().unwrap().contains("no_such_task"));

    let out = axis(&["run-task", "t_fig1", "--policy", "mouse_only"]);
    assert_eq!(out.status.code(), Some(2));

    let out = Command::new(env!("CARGO_BIN_EXE_axis"))
        .args(["bench", "--planner", "remote"])
        .env_remove("AXIS_PLANNER_URL")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("AXIS_PLANNER_URL"));
}
