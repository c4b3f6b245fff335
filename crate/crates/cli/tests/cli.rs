use fleetmc::actors::Model;
use fleetmc::checker::{read_trace, replay};
use fleetmc::scenario::load_scenario;
use fleetmc::worldmodel::{parse_pgm, parse_text_grid};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn fleetmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fleetmc")).args(args).output().expect("run fleetmc")
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(fleetmc(&["check", s(&scenario("small10.json"))]).status.code(), Some(0));

    let trace = dir.path().join("cx.jsonl");
    let out = fleetmc(&["check", s(&scenario("corridor_collision.json")), "--trace-out", s(&trace)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains(r#""outcome":"COLLISION""#));
    assert!(std::fs::metadata(&trace).unwrap().len() > 0);

    let out = fleetmc(&["check", s(&scenario("boxed_in.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("LIVELOCK_STUCK"));

    let out = fleetmc(&["check", s(&scenario("crossing20.json")), "--max-model-time", "1000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stdout).contains("BOUND_REACHED"));
}

#[test]
fn config_problems_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"map": {"source": "missing.pgm", "cell_width_mm": 255}, "robots": []}"#).unwrap();
    for args in [
        vec!["check", s(&bad)],
        vec!["simulate", s(&bad)],
        vec!["check", "/no/such/scenario.json"],
        vec!["check"],
        vec!["frobnicate"],
        vec!["preprocess", "/no/such/map.pgm"],
    ] {
        let out = fleetmc(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(fleetmc(&["--help"]).status.code(), Some(0));
}

#[test]
fn check_with_parallel_search_gives_the_same_verdict() {
    let strip = |o: Output| {
        let mut v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        v.as_object_mut().unwrap().remove("wall_ms");
        v
    };
    let path = scenario("crossing20.json");
    let one = strip(fleetmc(&["check", s(&path), "--bfs"]));
    let four = strip(fleetmc(&["check", s(&path), "--jobs", "4"]));
    assert_eq!(one, four);
    assert_eq!(one["outcome"], "ALL_PROPERTIES_HOLD");
}

#[test]
fn simulate_is_repeatable_and_summarizes() {
    let path = scenario("small10.json");
    let a = fleetmc(&["simulate", s(&path), "--runs", "1", "--seed", "7"]);
    let b = fleetmc(&["simulate", s(&path), "--runs", "1", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let out = text(&fleetmc(&["simulate", s(&path), "--runs", "10"]).stdout);
    assert_eq!(out.lines().filter(|l| l.starts_with("seed=")).count(), 10);
    assert_eq!(out.lines().last().unwrap(), "runs=10 arrived=10 collided=0 stuck=0 deadlocked=0 bound_reached=0");
}

#[test]
fn unsafe_configuration_varies_across_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(scenario("small10.json")).unwrap()).unwrap();
    v["robots"][1]["speed_mm_s"] = 600.into();
    let path = dir.path().join("unsafe.json");
    std::fs::write(&path, v.to_string()).unwrap();
    assert_eq!(fleetmc(&["check", s(&path)]).status.code(), Some(1));
    let out = text(&fleetmc(&["simulate", s(&path), "--runs", "50"]).stdout);
    let runs: std::collections::BTreeSet<String> =
        out.lines().filter(|l| l.starts_with("seed=")).map(|l| l.split_once(' ').unwrap().1.to_string()).collect();
    assert!(runs.len() > 1, "{out}");
}

#[test]
fn several_runs_write_one_trace_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("run.jsonl");
    let out =
        fleetmc(&["simulate", s(&scenario("small10.json")), "--seed", "3", "--runs", "2", "--trace-out", s(&base)]);
    assert!(out.status.success());
    assert!(dir.path().join("run.seed3.jsonl").exists());
    assert!(dir.path().join("run.seed4.jsonl").exists());
}

fn frames(out: &str) -> Vec<(String, Vec<String>)> {
    let mut res: Vec<(String, Vec<String>)> = Vec::new();
    for line in out.lines() {
        if line.starts_with("t=") {
            res.push((line.to_string(), Vec::new()));
        } else if let Some(f) = res.last_mut() {
            if !line.starts_with("notice") {
                f.1.push(line.to_string());
            }
        }
    }
    res
}

#[test]
fn render_draws_starts_goals_and_collisions() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario("corridor_collision.json");
    let trace = dir.path().join("cx.jsonl");
    fleetmc(&["check", s(&path), "--trace-out", s(&trace)]);
    let records = read_trace(std::io::BufReader::new(std::fs::File::open(&trace).unwrap())).unwrap();
    let end = records.last().unwrap().time_ms;

    let out = fleetmc(&[
        "render",
        s(&path),
        "--trace",
        s(&trace),
        "--at",
        "0",
        "--at",
        "1000",
        "--at",
        &end.to_string(),
        "--at",
        &(end + 500).to_string(),
        "--pgm-dir",
        s(&dir.path().join("frames")),
    ]);
    assert!(out.status.success());
    let stdout = text(&out.stdout);
    let f = frames(&stdout);
    assert_eq!(f.len(), 4);
    assert_eq!(f[0].1[2], "...1......................2...");
    assert_eq!(f[0].1[0], "#".repeat(30));
    assert_eq!(f[2].1[2].matches('X').count(), 2);
    assert_eq!(f[2].1[2].matches('*').count(), 2);
    assert_eq!(stdout.matches("notice").count(), 1);
    assert_eq!(f[3].1, f[2].1);

    // The middle frame shows the poses reached by replaying up to 1000 ms.
    let model = Model::new(load_scenario(&path).unwrap());
    let prefix: Vec<_> = records.iter().filter(|r| r.time_ms <= 1000).cloned().collect();
    let w = replay(&model, &prefix).unwrap();
    for r in &w.robots {
        let row = &f[1].1[r.pose.ry as usize];
        assert_eq!(row.as_bytes()[r.pose.rx as usize], b'0' + (r.id % 10) as u8);
    }

    let pgm = std::fs::read(dir.path().join("frames").join("frame_00000000.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n240 40\n255\n"));
}

#[test]
fn render_without_trace_shows_the_initial_state() {
    let out = text(&fleetmc(&["render", s(&scenario("small10.json")), "--paths"]).stdout);
    let f = frames(&out);
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].1[5], ".1++++++*.");
    assert_eq!(f[0].1[1], ".....2....");
}

#[test]
fn preprocess_writes_grid_and_trig_table() {
    let dir = tempfile::tempdir().unwrap();
    let map = scenario("maps/warehouse50.pgm");
    let out = fleetmc(&["preprocess", s(&map), "--cell-width", "255", "--out-dir", s(dir.path())]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let grid_text = std::fs::read_to_string(dir.path().join("warehouse50.grid.txt")).unwrap();
    let from_pgm = parse_pgm(&std::fs::read(&map).unwrap(), 255, 128).unwrap();
    assert_eq!(parse_text_grid(&grid_text, 255).unwrap(), from_pgm);

    let csv = std::fs::read_to_string(dir.path().join("trig.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "degree,cos_x1e4,sin_x1e4,tan_x1e4");
    assert_eq!(lines.len(), 361);
    assert_eq!(lines[1], "0,10000,0,0");
    assert_eq!(lines[91], "90,0,10000,undefined");
}

#[test]
fn replay_reports_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario("corridor_collision.json");
    let trace = dir.path().join("cx.jsonl");
    fleetmc(&["check", s(&path), "--trace-out", s(&trace)]);
    let good = fleetmc(&["replay", s(&path), "--trace", s(&trace)]);
    assert_eq!(good.status.code(), Some(0));
    assert!(text(&good.stdout).contains(r#""collision_flag":true"#));

    let mut lines: Vec<String> = std::fs::read_to_string(&trace).unwrap().lines().map(String::from).collect();
    lines[5] = lines[5].replace(r#""time_ms":"#, r#""time_ms":1"#);
    std::fs::write(&trace, lines.join("\n")).unwrap();
    let bad = fleetmc(&["replay", s(&path), "--trace", s(&trace)]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(text(&bad.stderr).contains("diverged at step 6"), "{}", text(&bad.stderr));
}
