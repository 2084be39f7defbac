use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mrdrrt::oracle::ValidationReport;
use mrdrrt::planner::RunReport;
use mrdrrt::PlanFile;

fn mrdrrt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrdrrt")).args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = mrdrrt(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_scenario(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(format!("{name}.json"));
    fs::write(&p, json).unwrap();
    p
}

const EMPTY_ROOM: &str = r#"{
  "name": "empty-room",
  "workspace": [[0,0],[8,0],[8,8],[0,8]],
  "robots": [
    {"radius": 0.5, "start": [1,1], "target": [7,7]},
    {"radius": 0.5, "start": [7,1], "target": [1,7]},
    {"radius": 0.5, "start": [4,4], "target": [4,1]}
  ]
}"#;

const SWAP: &str = r#"{
  "name": "swap",
  "workspace": [[0,0],[8,0],[8,3],[0,3]],
  "robots": [
    {"radius": 0.5, "start": [1,1.5], "target": [7,1.5]},
    {"radius": 0.5, "start": [7,1.5], "target": [1,1.5]}
  ]
}"#;

const WALLED: &str = r#"{
  "name": "walled",
  "workspace": [[0,0],[8,0],[8,8],[0,8]],
  "obstacles": [[[3.8,0],[4.2,0],[4.2,8],[3.8,8]]],
  "robots": [{"radius": 0.5, "start": [1,1], "target": [7,7]}]
}"#;

const STAY: &str = r#"{
  "name": "stay",
  "workspace": [[0,0],[8,0],[8,8],[0,8]],
  "robots": [
    {"radius": 0.5, "start": [1,1], "target": [1,1]},
    {"radius": 0.5, "start": [5,5], "target": [5,5]}
  ]
}"#;

#[test]
fn build_roadmaps_writes_one_file_per_robot() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "room", EMPTY_ROOM);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&["build-roadmaps", s(&sc), "--out", s(&a), "--seed", "3", "--prm-n", "60"]);
    ok(&["build-roadmaps", s(&sc), "--out", s(&b), "--seed", "3", "--prm-n", "60"]);
    for i in 0..3 {
        let name = format!("robot-{i}.json");
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap());
    }
    assert!(!a.join("robot-3.json").exists());
}

#[test]
fn walled_robot_fails_with_message() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "walled", WALLED);
    let out = mrdrrt(&["build-roadmaps", s(&sc), "--out", s(&tmp.path().join("m")), "--prm-n", "40", "--prm-batches", "2"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("roadmap disconnected"));
}

#[test]
fn plan_validate_render_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "swap", SWAP);
    let maps = tmp.path().join("maps");
    ok(&["build-roadmaps", s(&sc), "--out", s(&maps), "--seed", "2", "--prm-n", "80"]);
    let plan = tmp.path().join("plan.json");
    let report = tmp.path().join("report.json");
    ok(&["plan", s(&sc), "--roadmaps", s(&maps), "--seed", "2", "--out", s(&plan), "--report", s(&report)]);
    let rep: RunReport = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(rep.success);

    let out = ok(&["validate", s(&sc), s(&plan), "--roadmaps", s(&maps)]);
    let v: ValidationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.ok);

    // tamper with one waypoint
    let mut p = PlanFile::load(&plan).unwrap();
    let last = p.steps.len() - 1;
    p.steps[last].targets[0].x += 0.125;
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, p.to_json().unwrap()).unwrap();
    let out = mrdrrt(&["validate", s(&sc), s(&bad), "--roadmaps", s(&maps)]);
    assert_eq!(out.status.code(), Some(1));
    let v: ValidationReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v.violations[0].step, Some(last));

    // no steps at all
    let empty = tmp.path().join("empty.json");
    fs::write(&empty, r#"{"scenario":"swap","seed":0,"steps":[]}"#).unwrap();
    let out = mrdrrt(&["validate", s(&sc), s(&empty), "--roadmaps", s(&maps)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("wrong_target"));

    let svg_a = tmp.path().join("a.svg");
    let svg_b = tmp.path().join("b.svg");
    let map_only = tmp.path().join("map.svg");
    ok(&["render", s(&sc), "--plan", s(&plan), "--out", s(&svg_a)]);
    ok(&["render", s(&sc), "--plan", s(&plan), "--out", s(&svg_b)]);
    ok(&["render", s(&sc), "--out", s(&map_only)]);
    let svg = fs::read_to_string(&svg_a).unwrap();
    assert_eq!(svg, fs::read_to_string(&svg_b).unwrap());
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert_eq!(fs::read_to_string(&map_only).unwrap().matches("<polyline").count(), 0);
}

#[test]
fn plan_is_seed_deterministic_without_saved_roadmaps() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "room", EMPTY_ROOM);
    let mut plans = Vec::new();
    for run in 0..2 {
        let out = tmp.path().join(format!("p{run}.json"));
        let report = tmp.path().join(format!("r{run}.json"));
        ok(&["plan", s(&sc), "--seed", "9", "--prm-n", "80", "--out", s(&out), "--report", s(&report)]);
        plans.push(fs::read(&out).unwrap());
    }
    assert_eq!(plans[0], plans[1]);
}

#[test]
fn identical_endpoints_give_empty_plan() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "stay", STAY);
    let plan = tmp.path().join("plan.json");
    let out = ok(&["plan", s(&sc), "--prm-n", "40", "--out", s(&plan)]);
    let rep: RunReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep.path_steps, Some(0));
    assert!(PlanFile::load(&plan).unwrap().steps.is_empty());
}

#[test]
fn failed_plan_exits_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "swap", SWAP);
    let plan = tmp.path().join("plan.json");
    let out = mrdrrt(&["plan", s(&sc), "--prm-n", "60", "--max-iters", "0", "--out", s(&plan)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!plan.exists());
}

#[test]
fn cartesian_mode_and_fallback_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "swap", SWAP);
    let maps = tmp.path().join("maps");
    ok(&["build-roadmaps", s(&sc), "--out", s(&maps), "--seed", "4", "--prm-n", "80"]);
    let plan = tmp.path().join("plan.json");
    ok(&[
        "plan", s(&sc), "--roadmaps", s(&maps), "--seed", "4", "--mode", "cartesian", "--fallback", "on",
        "--time-budget-ms", "20000", "--out", s(&plan),
    ]);
    let p = PlanFile::load(&plan).unwrap();
    assert!(p.steps.iter().all(|st| st.mover.is_some()));
    ok(&["validate", s(&sc), s(&plan), "--roadmaps", s(&maps)]);
}

#[test]
fn bench_reports_rates() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("scenarios");
    fs::create_dir(&dir).unwrap();
    write_scenario(&dir, "swap", SWAP);
    write_scenario(&dir, "walled", WALLED);
    let csv = tmp.path().join("bench.csv");
    let reports = tmp.path().join("reports");
    ok(&[
        "bench", s(&dir), "--seeds", "2", "--prm-n", "60", "--prm-batches", "2", "--out", s(&csv), "--reports",
        s(&reports),
    ]);
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scenario,seeds,success_rate,mean_visited,mean_expand_ms,mean_connect_ms,mean_total_ms");
    assert!(lines[1].starts_with("swap,2,100.0,"));
    assert_eq!(lines[2], "walled,2,0.0,NA,NA,NA,NA");
    assert_eq!(fs::read_dir(&reports).unwrap().count(), 2);
}

#[test]
fn bundled_suite_has_four_rows() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let out = ok(&["bench", s(&dir), "--seeds", "2", "--timing", "off"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().skip(1).all(|l| l.split(',').nth(2) == Some("100.0")));
}

#[test]
fn bad_input_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let sc = write_scenario(tmp.path(), "broken", "{\"name\": 1}");
    let out = mrdrrt(&["render", s(&sc), "--out", s(&tmp.path().join("x.svg"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
