use std::path::Path;
use std::process::{Command, Output};

const FREE_WORLD: &str = r#"{
  "name": "free",
  "world": { "bounds": { "min": [0, 0], "max": [4, 4] }, "obstacles": [] },
  "robot_levels": [ { "type": "disk", "radius": 0.2 } ],
  "bundles": [],
  "start": [0.5, 0.5],
  "goal": [3.5, 3.5],
  "goal_tolerance": 1e-6,
  "inflated": [false]
}"#;

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bench")).args(args).env_remove("FIBERDANCE_SEED").output().unwrap()
}

fn run_free(dir: &Path, extra: &[&str], seed_env: Option<&str>) -> Output {
    let scenario = dir.join("free.json");
    std::fs::write(&scenario, FREE_WORLD).unwrap();
    let out = dir.join("out");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bench"));
    cmd.args(["run", "--scenario", scenario.to_str().unwrap(), "--planner", "RRT,PRM", "--runs", "2"])
        .args(["--cutoff", "2", "--out", out.to_str().unwrap()])
        .args(extra)
        .env_remove("FIBERDANCE_SEED");
    if let Some(s) = seed_env {
        cmd.env("FIBERDANCE_SEED", s);
    }
    cmd.output().unwrap()
}

#[test]
fn help_and_version_succeed() {
    assert!(bench(&["--help"]).status.success());
    assert!(bench(&["--version"]).status.success());
    assert!(bench(&["run", "--help"]).status.success());
}

#[test]
fn bad_invocations_exit_with_one() {
    assert_eq!(bench(&[]).status.code(), Some(1));
    assert_eq!(bench(&["run", "--bogus"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let unknown = bench(&["run", "--scenario", "no_such_world", "--out", out]);
    assert_eq!(unknown.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("no_such_world"));
    let planner = bench(&["run", "--scenario", "slit_2d", "--planner", "XYZ", "--out", out]);
    assert_eq!(planner.status.code(), Some(1));
    let runs = bench(&["run", "--scenario", "slit_2d", "--runs", "0", "--out", out]);
    assert_eq!(runs.status.code(), Some(1));
}

#[test]
fn broken_scenario_file_names_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, FREE_WORLD.replace("\"bundles\": [],", "\"bundles\": [,")).unwrap();
    let o = bench(&["run", "--scenario", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"));
}

#[test]
fn run_writes_results_and_summarize_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_free(dir.path(), &[], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("free,") && l.contains(",true,")));
    assert_eq!(std::fs::read_dir(out.join("runs")).unwrap().count(), 4);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("2/2"));

    let s = bench(&["summarize", out.to_str().unwrap()]);
    assert!(s.status.success());
    assert_eq!(String::from_utf8_lossy(&s.stdout), stdout);
}

#[test]
fn seed_environment_overrides_the_flag() {
    let seeds = |o: &Output, dir: &Path| -> Vec<String> {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let csv = std::fs::read_to_string(dir.join("out/results.csv")).unwrap();
        csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().to_string()).collect()
    };
    let a = tempfile::tempdir().unwrap();
    let o = run_free(a.path(), &["--seed", "3"], Some("40"));
    let mut got = seeds(&o, a.path());
    got.sort();
    got.dedup();
    assert_eq!(got, ["40", "41"]);

    let b = tempfile::tempdir().unwrap();
    let o = run_free(b.path(), &[], Some("forty"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn render_draws_a_recorded_run() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_free(dir.path(), &[], None).status.success());
    let result = dir.path().join("out/runs/free__RRT__0.json");
    let svg = dir.path().join("path.svg");
    let o = bench(&[
        "render",
        "--scenario",
        dir.path().join("free.json").to_str().unwrap(),
        "--result",
        result.to_str().unwrap(),
        "--ghosts",
        "5",
        "--out",
        svg.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(svg).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(doc.descendants().filter(|n| n.attribute("class") == Some("ghost")).count(), 5);
}

#[test]
fn admissibility_report_per_bundle() {
    let o = bench(&["check-admissibility", "--scenario", "double_L_2d", "--samples", "500"]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout), "bundle 0: inflated, skipped\n");
    let o = bench(&["check-admissibility", "--scenario", "chain_egress_2d", "--samples", "500"]);
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("bundle 0: 0 violations in 500 samples"));
    assert!(text.contains("bundle 1: 0 violations in 500 samples"));
    assert_eq!(bench(&["check-admissibility", "--scenario", "slit_2d", "--samples", "0"]).status.code(), Some(1));
}
