//! Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use fleetmc::actors::Model;
use fleetmc::checker::{explore, replay, shift_times, simulate, state_digest, Edge, ExploreOptions, Outcome};
use fleetmc::geometry::{shadow_at, shadows_intersect, Cell, Dir, Footprint, Vec2};
use fleetmc::planner::{generate_path, path_cost};
use fleetmc::scenario::{load_scenario, parse_scenario, RobotConfig, RobotParams, Scenario};
use fleetmc::worldmodel::{OccupancyGrid, TrigTable};
use fleetmc::PointF;
use fleetmc_oracles::{
    dijkstra_cost, exact_shadow, random_grid, random_world, sampled_intersection, sweep_first_contact, to_f64,
    trig_reference,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

type Verdict = Result<String, String>;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn fleetmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fleetmc")).args(args).output().expect("run fleetmc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn json(s: &str) -> Result<serde_json::Value, String> {
    serde_json::from_str(s.trim()).map_err(|e| format!("bad JSON {s:?}: {e}"))
}

/// Largest resident set of any finished child process, in bytes.
fn children_max_rss() -> Option<u64> {
    let mut ru: libc::rusage = unsafe { std::mem::zeroed() };
    if unsafe { libc::getrusage(libc::RUSAGE_CHILDREN, &mut ru) } != 0 {
        return None;
    }
    let scale = if cfg!(target_os = "macos") { 1 } else { 1024 };
    Some(ru.ru_maxrss as u64 * scale)
}

fn working_case_simulation() -> Verdict {
    let path = scenario("warehouse_working.json");
    let s = load_scenario(&path).map_err(|e| e.to_string())?;
    ensure(s.grid.width() == 50 && s.grid.height() == 50 && s.grid.cell_width_mm() == 255, || {
        "map is not 50x50 at 255 mm".into()
    })?;
    ensure(s.robots.len() == 5, || "expected five robots".into())?;
    let t = Instant::now();
    let out = fleetmc(&["simulate", path.to_str().unwrap(), "--runs", "20"]);
    let wall = t.elapsed();
    let text = stdout(&out);
    let summary = text.lines().last().unwrap_or_default().to_string();
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    ensure(summary.starts_with("runs=20 arrived=20 collided=0 "), || summary.clone())?;
    ensure(wall < Duration::from_secs(60), || format!("took {wall:?}"))?;
    Ok(format!("{summary} in {:.2} s", wall.as_secs_f64()))
}

fn working_case_check() -> Verdict {
    let path = scenario("crossing20.json");
    let s = load_scenario(&path).map_err(|e| e.to_string())?;
    ensure(s.grid.width() == 20 && s.robots.len() == 2, || "expected a 20x20 map with two robots".into())?;
    let t = Instant::now();
    let out = fleetmc(&["check", path.to_str().unwrap()]);
    let wall = t.elapsed();
    let v = json(&stdout(&out))?;
    ensure(out.status.code() == Some(0), || format!("exit {:?}", out.status.code()))?;
    ensure(v["outcome"] == "ALL_PROPERTIES_HOLD", || format!("verdict {v}"))?;
    ensure(wall < Duration::from_secs(300), || format!("took {wall:?}"))?;
    let rss = children_max_rss();
    if let Some(rss) = rss {
        ensure(rss < 4 << 30, || format!("peak memory {} MiB", rss >> 20))?;
    }
    Ok(format!(
        "ALL_PROPERTIES_HOLD, {} states, {:.2} s, peak child RSS {}",
        v["states"],
        wall.as_secs_f64(),
        rss.map_or("unknown".into(), |r| format!("{} MiB", r >> 20))
    ))
}

fn non_working_case() -> Verdict {
    let path = scenario("corridor_collision.json");
    let s = load_scenario(&path).map_err(|e| e.to_string())?;
    ensure(s.robots.iter().all(|r| r.params.stop_zone_mm < s.grid.cell_width_mm()), || {
        "stop zone not below cell width".into()
    })?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let trace = dir.path().join("cx.jsonl");
    let out = fleetmc(&["check", path.to_str().unwrap(), "--trace-out", trace.to_str().unwrap()]);
    let v = json(&stdout(&out))?;
    ensure(out.status.code() == Some(1) && v["outcome"] == "COLLISION", || {
        format!("exit {:?}, verdict {v}", out.status.code())
    })?;
    let warned = String::from_utf8_lossy(&out.stderr).lines().filter(|l| l.starts_with("WARN")).count();
    ensure(warned == s.robots.len(), || format!("{warned} guard warnings"))?;
    let out = fleetmc(&["replay", path.to_str().unwrap(), "--trace", trace.to_str().unwrap()]);
    let r = json(&stdout(&out))?;
    ensure(out.status.code() == Some(0), || format!("replay exit {:?}", out.status.code()))?;
    ensure(r["collision_flag"] == true && r["state"] == "COLLISION", || format!("replay ended in {r}"))?;

    let model = Model::new(s);
    let records = fleetmc::checker::read_trace(std::io::BufReader::new(std::fs::File::open(&trace).unwrap()))
        .map_err(|e| e.to_string())?;
    let w = replay(&model, &records).map_err(|e| e.to_string())?;
    ensure(w.map.collision_flag, || "in-process replay lost the collision".into())?;
    let mut hits = 0;
    for seed in 0..100 {
        if simulate(&model, seed, 600_000).map_err(|e| e.to_string())?.outcome == Outcome::Collision {
            hits += 1;
        }
    }
    Ok(format!(
        "COLLISION with a {}-step counterexample, replay exact; simulation found it in {hits}/100 seeds",
        records.len()
    ))
}

/// Robot A drives diagonally from world point (150, 150); a thin parked bar
/// B lies across its way at world point (1350, 1050).
fn threshold_model(cw: i64) -> Model {
    let cells = (3000 / cw) as u32;
    let g = OccupancyGrid::empty(cells, cells, cw).unwrap();
    let at = |mm: i64| ((mm - cw / 2) / cw) as i32;
    let mut pa = RobotParams::defaults(cw);
    pa.stop_zone_mm = 0;
    let mut pb = RobotParams::defaults(cw);
    pb.footprint = Footprint::new(400, 10, 0);
    let a = RobotConfig {
        id: 1,
        start: Cell::new(at(150), at(150)),
        start_dir: Dir::ALL[1],
        goal: Cell::new(at(2550), at(2550)),
        params: pa,
    };
    let b_cell = Cell::new(at(1350), at(1050));
    let b = RobotConfig { id: 2, start: b_cell, start_dir: Dir::ALL[3], goal: b_cell, params: pb };
    Model::new(Scenario::new(g, vec![a, b], 0).unwrap())
}

fn step_threshold() -> Verdict {
    let fa = Footprint::new(400, 400, 0);
    let fb = Footprint::new(400, 10, 0);
    let bar = exact_shadow(PointF::new(1350.0, 1050.0), 135.0, &fb);
    let contact = sweep_first_contact(PointF::new(150.0, 150.0), PointF::new(2550.0, 2550.0), 45.0, &fa, &bar, 1.0)
        .ok_or("continuous sweep never touches the bar")?;
    let coarse = threshold_model(300);
    let fine = threshold_model(100);
    let limit = 400.0 / 2f64.sqrt();
    ensure(100.0 < limit && limit < 300.0, || "cell widths do not straddle length/sqrt2".into())?;
    let opts = ExploreOptions::default();
    let c = explore(&coarse, &opts).map_err(|e| e.to_string())?;
    let f = explore(&fine, &opts).map_err(|e| e.to_string())?;
    ensure(c.outcome == Outcome::AllPropertiesHold, || format!("coarse run: {:?}", c.outcome))?;
    ensure(f.outcome == Outcome::Collision, || format!("fine run: {:?}", f.outcome))?;
    Ok(format!(
        "continuous contact after {contact:.0} mm; 300 mm cells: {}, 100 mm cells: {}",
        c.outcome.as_str(),
        f.outcome.as_str()
    ))
}

fn planner_optimality() -> Verdict {
    let t = Instant::now();
    let mut solvable = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_grid(&mut rng, 15, 15, 0.2, 255);
        let free: Vec<Cell> = g.iter_cells().filter(|&c| g.is_free(c)).collect();
        let (s, goal) = (free[rng.gen_range(0..free.len())], free[rng.gen_range(0..free.len())]);
        let astar = generate_path(&g, s, goal).ok().map(|p| path_cost(s, &p));
        let reference = dijkstra_cost(&g, s, goal);
        ensure(astar == reference, || format!("seed {seed}: A* {astar:?}, Dijkstra {reference:?}"))?;
        solvable += astar.is_some() as u32;
    }
    let wall = t.elapsed();
    ensure(wall < Duration::from_secs(10), || format!("took {wall:?}"))?;
    Ok(format!("100 grids ({solvable} solvable) agree exactly in {:.3} s", wall.as_secs_f64()))
}

fn trace_inclusion() -> Verdict {
    let model = Model::new(load_scenario(&scenario("small10.json")).map_err(|e| e.to_string())?);
    ensure(model.grid().width() == 10 && model.robots().len() == 2, || "expected a 10x10 map with two robots".into())?;
    let opts = ExploreOptions { record_edges: true, stop_on_violation: false, ..ExploreOptions::default() };
    let e = explore(&model, &opts).map_err(|e| e.to_string())?;
    ensure(e.outcome != Outcome::BoundReached, || "exploration did not finish".into())?;
    let edges = e.edges.as_ref().unwrap();
    let d0 = state_digest(&model.initial_world());
    let mut steps = 0;
    let mut distinct = std::collections::HashSet::new();
    for seed in 0..20 {
        let run = simulate(&model, seed, 600_000).map_err(|e| e.to_string())?;
        let mut from = d0;
        for (i, (label, rec)) in run.labels.iter().zip(&run.trace).enumerate() {
            let to = u64::from_str_radix(&rec.state_digest, 16).map_err(|e| e.to_string())?;
            ensure(edges.contains(&Edge { from, label: *label, to }), || {
                format!("seed {seed} step {}: edge missing", i + 1)
            })?;
            from = to;
            steps += 1;
        }
        distinct.insert(run.labels.clone());
    }
    Ok(format!(
        "20 runs ({} distinct, {steps} steps) contained in {} states / {} edges",
        distinct.len(),
        e.states,
        edges.len()
    ))
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = scenario("small10.json");
    let mut traces = Vec::new();
    for name in ["a.jsonl", "b.jsonl"] {
        let t = dir.path().join(name);
        let out = fleetmc(&["simulate", path.to_str().unwrap(), "--seed", "7", "--trace-out", t.to_str().unwrap()]);
        ensure(out.status.success(), || format!("simulate exit {:?}", out.status.code()))?;
        traces.push(std::fs::read(&t).map_err(|e| e.to_string())?);
    }
    ensure(!traces[0].is_empty() && traces[0] == traces[1], || "trace files differ".into())?;
    let mut verdicts = Vec::new();
    for _ in 0..2 {
        let mut v = json(&stdout(&fleetmc(&["check", path.to_str().unwrap()])))?;
        v.as_object_mut().ok_or("verdict is not an object")?.remove("wall_ms");
        verdicts.push(v);
    }
    ensure(verdicts[0] == verdicts[1], || format!("{} vs {}", verdicts[0], verdicts[1]))?;
    Ok(format!("trace files identical ({} bytes), verdicts identical", traces[0].len()))
}

fn canonicalization() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..1000 {
        let (_, w) = random_world(&mut rng, 400);
        let delta = rng.gen_range(-10_000_000i64..10_000_000);
        ensure(state_digest(&shift_times(&w, delta)) == state_digest(&w), || format!("state {i}, shift {delta}"))?;
    }
    Ok("1000/1000 shifted states hash identically".into())
}

fn trig_and_geometry() -> Verdict {
    let table = TrigTable::global();
    let mut worst: f64 = 0.0;
    for deg in 0..360 {
        let (c, s, tan) = trig_reference(deg);
        worst = worst.max((table.cos(deg) as f64 - c).abs()).max((table.sin(deg) as f64 - s).abs());
        if let (Some(a), Some(b)) = (table.tan(deg), tan) {
            worst = worst.max((a as f64 - b).abs());
        }
    }
    ensure(worst <= 1.0, || format!("trig deviation {worst}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut boundary = 0;
    for i in 0..1000 {
        let mut rect = || {
            let fp = Footprint::new(rng.gen_range(10..=800), rng.gen_range(10..=800), rng.gen_range(0..=50));
            shadow_at(Vec2::new(rng.gen_range(-600..=600), rng.gen_range(-600..=600)), rng.gen_range(0..360), &fp)
        };
        let (a, b) = (rect(), rect());
        let sat = shadows_intersect(&a, &b);
        let s = sampled_intersection(&to_f64(&a), &to_f64(&b), 0.25);
        if sat != s.hit {
            let margin = if sat { s.gap } else { s.depth };
            ensure(margin <= 1.0, || format!("pair {i}: SAT {sat}, sampling {s:?}"))?;
            boundary += 1;
        }
    }
    Ok(format!("max trig deviation {worst:.3} units; 1000 pairs, {boundary} within 1 mm slack, 0 disagreements"))
}

fn scan_rate_guard() -> Verdict {
    let mut cases = vec![(255i64, 1275i64, 100i64)];
    for cw in [100, 150, 200, 255, 300, 400] {
        for speed in (200..=3000).step_by(37).chain([1274, 1275, 1276, 1500]) {
            for period in [50, 80, 100, 150] {
                cases.push((cw, speed, period));
            }
        }
    }
    let mut fired = 0;
    for &(cw, speed, period) in &cases {
        let json = format!(
            r#"{{"map": {{"rows": ["00000", "00000", "00000", "00000", "00000"], "cell_width_mm": {cw}}},
                "robots": [{{"id": 1, "start": [2, 2], "goal": [2, 2], "speed_mm_s": {speed}, "scan_period_ms": {period}}}]}}"#
        );
        let s = parse_scenario(&json, Path::new(".")).map_err(|e| e.to_string())?;
        let hop = (cw as f64 * 1000.0 / speed as f64).round() as i64;
        let expected = hop <= 2 * period;
        ensure(s.warnings.len() == expected as usize, || {
            format!("cell {cw} speed {speed} scan {period}: {:?}", s.warnings)
        })?;
        fired += expected as u32;
    }
    let boundary = parse_scenario(
        r#"{"map": {"rows": ["000"], "cell_width_mm": 255}, "robots": [{"id": 1, "start": [1, 0], "goal": [1, 0], "speed_mm_s": 1275, "scan_period_ms": 100, "footprint": {"length_mm": 200, "width_mm": 200}}]}"#,
        Path::new("."),
    )
    .map_err(|e| e.to_string())?;
    ensure(boundary.warnings.len() == 1, || "boundary case 1275 mm/s did not warn".into())?;
    Ok(format!("{} combinations, {fired} warnings, all as predicted; 1275 mm/s at 255/100 warns", cases.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Verdict);
    let criteria: [Criterion; 10] = [
        ("working case, simulation", working_case_simulation),
        ("working case, checking", working_case_check),
        ("non-working case detection", non_working_case),
        ("step size threshold", step_threshold),
        ("planner optimality", planner_optimality),
        ("trace inclusion", trace_inclusion),
        ("determinism", determinism),
        ("canonicalization", canonicalization),
        ("trig and geometry oracles", trig_and_geometry),
        ("scan rate guard", scan_rate_guard),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
