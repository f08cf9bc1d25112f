use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fourpi-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], dir: &PathBuf) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fourpi")).args(args).env("FOURPI_OUT_DIR", dir).output().unwrap()
}

fn json(args: &[&str], dir: &PathBuf) -> Value {
    let out = run(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scenario(name: &str) -> String {
    format!("{}/../../scenarios/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn plan_crosswind_four_pi() {
    let dir = scratch("plan");
    let v = json(&["plan", "--goal=-2.3,2.8,1.5707963267948966", "--current-xy=-0.5,0", "--mode", "4pi"], &dir);
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["command"], "plan");
    assert_eq!(v["results"]["solution"]["path_type"], "LSL");
    let t = v["results"]["T"].as_f64().unwrap();
    assert!((t - 10.51).abs() < 0.01 * 10.51, "{t}");
}

#[test]
fn plan_reports_unreachable_two_pi() {
    let dir = scratch("unreach");
    let v = json(&["plan", "--goal-deg", "6,3,315", "--current-deg", "0.5,60", "--mode", "2pi"], &dir);
    assert_eq!(v["results"]["status"], "unreachable");
}

#[test]
fn degree_flags_match_radians() {
    let dir = scratch("deg");
    let rad = json(&["plan", "--goal", &format!("-1,4,{}", PI / 4.0), "--current", &format!("0.5,{PI}")], &dir);
    let deg = json(&["plan", "--goal-deg", "-1,4,45", "--current-deg", "0.5,180"], &dir);
    let (a, b) = (rad["results"]["T"].as_f64().unwrap(), deg["results"]["T"].as_f64().unwrap());
    assert!((a - b).abs() < 1e-9);
    assert!((a - 13.21).abs() < 0.01 * 13.21);
}

#[test]
fn echoed_inputs_replay() {
    let dir = scratch("echo");
    let first = json(&["plan", "--goal-deg", "3,-2,100", "--current-deg", "0.3,20", "--start", "1,1,0.5"], &dir);
    let i = &first["inputs"];
    let f = |v: &Value| v.as_f64().unwrap();
    let start = format!("{},{},{}", f(&i["start"]["x"]), f(&i["start"]["y"]), f(&i["start"]["theta"]));
    let goal = format!("{},{},{}", f(&i["goal"]["x"]), f(&i["goal"]["y"]), f(&i["goal"]["theta"]));
    let cur = format!("{},{}", f(&i["current"]["v_w"]), f(&i["current"]["theta_w"]));
    let again = json(&["plan", "--start", &start, "--goal", &goal, "--current", &cur], &dir);
    assert_eq!(first, again);
}

#[test]
fn malformed_pose_exits_2() {
    let dir = scratch("bad");
    let out = run(&["plan", "--start", "1,2", "--goal", "1,1,1", "--current", "0.1,0"], &dir);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["plan", "--goal", "1,x,1", "--current", "0.1,0"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn strong_current_exits_2() {
    let dir = scratch("strong");
    let out = run(&["plan", "--goal", "1,1,1", "--current", "1.2,0"], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("current speed must be less than vehicle speed"));
}

#[test]
fn plan_writes_trajectory() {
    let dir = scratch("traj");
    let v = json(&["plan", "--goal", "4,4,1", "--current", "0.4,2", "--traj", "if.csv", "--traj-cf", "cf.csv"], &dir);
    assert_eq!(v["results"]["files"].as_array().unwrap().len(), 2);
    let text = std::fs::read_to_string(dir.join("if.csv")).unwrap();
    assert!(text.lines().next().unwrap().starts_with("t,"));
    assert!(text.lines().count() > 100);
}

#[test]
fn reachmap_has_gaps() {
    let dir = scratch("map");
    let v = json(&["reachmap", "--theta-f", "5.497787143782138", "--current", "0.5,1.0471975511965976", "--step", "0.5", "--out", "map.csv"], &dir);
    assert_eq!(v["results"]["cells"], 41 * 41);
    assert!(v["results"]["unreachable"].as_u64().unwrap() > 0);
    assert_eq!(v["results"]["fully_reachable_2pi"], false);
    let text = std::fs::read_to_string(dir.join("map.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x,y,dominant,T");
    assert_eq!(text.lines().count(), 41 * 41 + 1);
}

#[test]
fn paramscan_counts_shrink() {
    let dir = scratch("scan");
    let step = (PI / 10.0).to_string();
    let v = json(&["paramscan", "--theta-f-step", &step, "--theta-w-step", &step, "--vw", "0.25,0.75", "--out", "scan.csv"], &dir);
    let c = v["results"]["counts"].as_array().unwrap();
    assert_eq!(c[0]["total"], 400);
    assert!(c[1]["reachable"].as_u64() < c[0]["reachable"].as_u64());
}

#[test]
fn montecarlo_is_reproducible() {
    let dir = scratch("mc");
    let args = ["montecarlo", "--profile", "naval", "--runs", "10", "--seed", "7", "--out", "runs.csv"];
    let a = run(&args, &dir);
    let csv_a = std::fs::read(dir.join("runs.csv")).unwrap();
    let b = run(&args, &dir);
    let csv_b = std::fs::read(dir.join("runs.csv")).unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(csv_a, csv_b);
    let out = run(&["montecarlo", "--profile", "submarine"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_scenario_files() {
    let dir = scratch("sim");
    let v = json(&["simulate", "--scenario", &scenario("current_turn.json"), "--out", "sim.csv"], &dir);
    assert_eq!(v["results"]["converged"], true);
    assert_eq!(v["results"]["replan_count"], 1);
    let t = v["results"]["total_time"].as_f64().unwrap();
    assert!((t - 51.2002).abs() < 1e-3, "{t}");
    let a = run(&["simulate", "--scenario", &scenario("random_naval.json"), "--seed", "4"], &dir);
    let b = run(&["simulate", "--scenario", &scenario("random_naval.json"), "--seed", "4"], &dir);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let out = run(&["simulate", "--scenario", "missing.json"], &dir);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn static_is_reproducible_without_timings() {
    let dir = scratch("static");
    let strip = |mut v: Value| {
        let s = v["results"]["summary"].as_object_mut().unwrap();
        s.remove("favor_4pi_measured");
        v
    };
    let a = strip(json(&["static", "--radii", "5"], &dir));
    let b = strip(json(&["static", "--radii", "5"], &dir));
    assert_eq!(a, b);
    assert_eq!(a["results"]["summary"]["instances"], 576);
}
