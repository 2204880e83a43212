//! End-to-end CLI tests: exit codes, file round trips, rendering, and the
//! determinism acceptance criterion.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_squadplan")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

const ROOM12: &str =
    "{\"name\":\"room12\",\"outer\":[[\"0\",\"0\"],[\"12\",\"0\"],[\"12\",\"12\"],[\"0\",\"12\"]],\"holes\":[]}\n";

const ROOM20: &str =
    "{\"name\":\"room20\",\"outer\":[[\"0\",\"0\"],[\"20\",\"0\"],[\"20\",\"20\"],[\"0\",\"20\"]],\"holes\":[]}\n";

/// Two rooms joined by a passage that erodes shut at radius 1.
const BLOCKED: &str = "{\"name\":\"blocked\",\"outer\":[[\"0\",\"0\"],[\"10\",\"0\"],[\"10\",\"4.4\"],[\"14\",\"4.4\"],[\"14\",\"0\"],[\"24\",\"0\"],[\"24\",\"10\"],[\"14\",\"10\"],[\"14\",\"5.6\"],[\"10\",\"5.6\"],[\"10\",\"10\"],[\"0\",\"10\"]],\"holes\":[]}\n";

#[test]
fn plan_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "room.json", ROOM20);
    let plan = dir.path().join("plan.json");
    let out = run(&[
        "plan",
        "--env",
        env.to_str().unwrap(),
        "--starts",
        "2,2",
        "--targets",
        "18,18",
        "--epsilon",
        "0.5",
        "--pitch",
        "1",
        "--out",
        plan.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("cost: 22.62741699796952"), "stdout: {stdout}");
    assert!(stdout.contains("landmarks:"));
    assert!(stdout.contains("samples:"));
    let out = run(&["verify", "--env", env.to_str().unwrap(), "--plan", plan.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("feasible at radius 1"));
    // the straight diagonal through a tight radius fails
    let out = run(&[
        "verify",
        "--env",
        env.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
        "--radius",
        "2.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("INFEASIBLE"));
}

#[test]
fn exit_code_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "bad.json", "{\"outer\": [[\"oops\",\"0\"]]}");
    let out = run(&[
        "plan",
        "--env",
        env.to_str().unwrap(),
        "--starts",
        "2,2",
        "--targets",
        "3,3",
        "--out",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("outer"));
}

#[test]
fn exit_code_unreachable() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "blocked.json", BLOCKED);
    let out = run(&[
        "plan",
        "--env",
        env.to_str().unwrap(),
        "--starts",
        "5,5",
        "--targets",
        "19,5",
        "--pitch",
        "1",
        "--out",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("unreachable"));
}

#[test]
fn exit_code_budget() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "room.json", ROOM12);
    let out = run(&[
        "plan",
        "--env",
        env.to_str().unwrap(),
        "--starts",
        "4,6;8,6",
        "--targets",
        "8,6;4,6",
        "--pitch",
        "1",
        "--budget-expansions",
        "2",
        "--out",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn simplify_rejects_non_robust_plan() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(
        dir.path(),
        "room.json",
        "{\"outer\":[[\"0\",\"0\"],[\"10\",\"0\"],[\"10\",\"10\"],[\"0\",\"10\"]],\"holes\":[]}\n",
    );
    // feasible at radius 1 but hugging the wall: not 1-robust
    let plan = write(
        dir.path(),
        "plan.json",
        "{\"k\":1,\"breakpoints\":[[[\"1.5\",\"5\"]],[[\"5\",\"5\"]]],\"cost\":\"3.5\"}\n",
    );
    let out = run(&[
        "simplify",
        "--env",
        env.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
        "--rho",
        "1",
        "--out",
        dir.path().join("x.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not 1-robust"));
}

#[test]
fn simplify_reduces_jittered_plan() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(
        dir.path(),
        "room.json",
        "{\"outer\":[[\"0\",\"0\"],[\"40\",\"0\"],[\"40\",\"40\"],[\"0\",\"40\"]],\"holes\":[]}\n",
    );
    // jittered single-robot walk, all placements deep inside F_2
    let mut bps = Vec::new();
    for i in 0..40 {
        let x = 5.0 + 0.25 * i as f64;
        let y = 10.0 + if i % 2 == 0 { 0.15 } else { -0.15 };
        bps.push(format!("[[\"{x}\",\"{y}\"]]"));
    }
    let plan_text = format!("{{\"k\":1,\"breakpoints\":[{}]}}\n", bps.join(","));
    let plan = write(dir.path(), "plan.json", &plan_text);
    let out_path = dir.path().join("simplified.json");
    let out = run(&[
        "simplify",
        "--env",
        env.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
        "--rho",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("breakpoints: 40 ->"), "stdout: {stdout}");
    let text = std::fs::read_to_string(&out_path).unwrap();
    let n = text.matches("[[\"").count();
    assert!(n < 40, "expected a reduction, got {n} breakpoints");
    // already-straight plans come back unchanged modulo formatting
    let straight = write(
        dir.path(),
        "straight.json",
        "{\"k\":1,\"breakpoints\":[[[\"5\",\"5\"]],[[\"25\",\"25\"]]]}\n",
    );
    let out2 = dir.path().join("straight_out.json");
    let out = run(&[
        "simplify",
        "--env",
        env.to_str().unwrap(),
        "--plan",
        straight.to_str().unwrap(),
        "--rho",
        "1",
        "--out",
        out2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out2).unwrap();
    assert!(text.contains("[[\"5\",\"5\"]],[[\"25\",\"25\"]]"));
}

#[test]
fn diagnose_reports_corridor() {
    let dir = tempfile::tempdir().unwrap();
    // dumbbell with a 3-wide, 46-long workspace passage
    let env = write(
        dir.path(),
        "dumbbell.json",
        "{\"outer\":[[\"0\",\"0\"],[\"10\",\"0\"],[\"10\",\"5\"],[\"56\",\"5\"],[\"56\",\"0\"],[\"66\",\"0\"],[\"66\",\"13\"],[\"56\",\"13\"],[\"56\",\"8\"],[\"10\",\"8\"],[\"10\",\"13\"],[\"0\",\"13\"]],\"holes\":[]}\n",
    );
    let out = run(&["diagnose", "--env", env.to_str().unwrap(), "--k", "2"]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("corridors: 1"), "stdout: {stdout}");
    assert!(stdout.contains("width 1 "), "stdout: {stdout}");
    assert!(stdout.contains("parking-"), "stdout: {stdout}");
    // convex room: no corridors
    let env = write(dir.path(), "room.json", ROOM12);
    let out = run(&["diagnose", "--env", env.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("corridors: 0"));
    // far-topology sweep summary
    let out = run(&[
        "diagnose",
        "--env",
        env.to_str().unwrap(),
        "--sweep-far-topology",
        "50",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("far-topology sweep:"), "stdout: {stdout}");
    assert!(!stdout.contains("warning:"), "bound exceeded: {stdout}");
}

#[test]
fn render_svg_structure() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "room.json", ROOM12);
    let plan = write(
        dir.path(),
        "swap.json",
        "{\"k\":2,\"breakpoints\":[[[\"4\",\"6\"],[\"8\",\"6\"]],[[\"6\",\"4\"],[\"8\",\"6\"]],[[\"6\",\"4\"],[\"4\",\"6\"]],[[\"8\",\"6\"],[\"4\",\"6\"]]]}\n",
    );
    let svg_path = dir.path().join("out.svg");
    let out = run(&[
        "render",
        "--env",
        env.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline class=\"trace\"").count(), 2, "one trace per robot");
    assert!(svg.contains("#d62728") && svg.contains("#1f77b4"), "distinct colors");
    // rendering is deterministic
    let svg_path2 = dir.path().join("out2.svg");
    run(&[
        "render",
        "--env",
        env.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
        "--out",
        svg_path2.to_str().unwrap(),
    ]);
    assert_eq!(svg, std::fs::read_to_string(&svg_path2).unwrap());
    // stationary plan: squares only, no traces
    let still = write(
        dir.path(),
        "still.json",
        "{\"k\":1,\"breakpoints\":[[[\"6\",\"6\"]],[[\"6\",\"6\"]]]}\n",
    );
    let svg_path3 = dir.path().join("still.svg");
    let out = run(&[
        "render",
        "--env",
        env.to_str().unwrap(),
        "--plan",
        still.to_str().unwrap(),
        "--out",
        svg_path3.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&svg_path3).unwrap();
    assert_eq!(svg.matches("<polyline class=\"trace\"").count(), 0);
    assert!(svg.contains("<rect"));
    // animated variant carries timed transforms
    let svg_path4 = dir.path().join("anim.svg");
    run(&[
        "render",
        "--env",
        env.to_str().unwrap(),
        "--plan",
        plan.to_str().unwrap(),
        "--out",
        svg_path4.to_str().unwrap(),
        "--animate",
    ]);
    let svg = std::fs::read_to_string(&svg_path4).unwrap();
    assert!(svg.contains("<animate attributeName=\"x\""));
}

#[test]
fn verify_stationary_plan() {
    let dir = tempfile::tempdir().unwrap();
    let env = write(dir.path(), "room.json", ROOM12);
    let plan = write(
        dir.path(),
        "still.json",
        "{\"k\":1,\"breakpoints\":[[[\"6\",\"6\"]],[[\"6\",\"6\"]]]}\n",
    );
    let out = run(&["verify", "--env", env.to_str().unwrap(), "--plan", plan.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("feasible at radius 1"));
}
