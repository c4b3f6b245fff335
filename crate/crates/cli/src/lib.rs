//! Command-line front end. Exit codes: 0 all properties hold (or the
//! command succeeded), 1 property violation or replay divergence, 2 bound
//! reached, 3 configuration or usage error.

mod render;

use anyhow::Context;
use clap::{Args as ClapArgs, Parser, Subcommand};
use fleetmc::actors::Model;
use fleetmc::checker::{
    classify, explore, read_trace, replay, replay_labels, simulate, write_trace, ExploreOptions, Outcome, ReplayError,
    StateClass, Strategy, TraceRecord, Verdict,
};
use fleetmc::scenario::{load_scenario, read_map_file, MapFormat, Scenario};
use fleetmc::worldmodel::{TrigTable, DEFAULT_OCCUPIED_THRESHOLD};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_BOUND: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "fleetmc", version, about = "Model checker and simulator for timed multi-robot fleets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Explore every interleaving and print a verdict as JSON.
    Check(CheckArgs),
    /// Run seeded simulations and summarize their outcomes.
    Simulate(SimulateArgs),
    /// Draw the scenario, optionally at points of a recorded trace.
    Render(RenderArgs),
    /// Write a map as a text grid together with the trig table.
    Preprocess(PreprocessArgs),
    /// Re-execute a trace and report the state it ends in.
    Replay(ReplayArgs),
}

#[derive(ClapArgs, Debug)]
struct CheckArgs {
    scenario: PathBuf,
    /// Model-time bound in milliseconds.
    #[arg(long, default_value_t = 600_000)]
    max_model_time: i64,
    #[arg(long, default_value_t = 5_000_000)]
    max_states: usize,
    /// Worker threads; more than one selects parallel breadth-first search.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Use breadth-first search even with one job.
    #[arg(long)]
    bfs: bool,
    /// Where to write the counterexample trace on a violation.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(ClapArgs, Debug)]
struct SimulateArgs {
    scenario: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    runs: u64,
    #[arg(long, default_value_t = 600_000)]
    max_model_time: i64,
    /// Trace file; with several runs the seed is added before the extension.
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(ClapArgs, Debug)]
struct RenderArgs {
    scenario: PathBuf,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Model time of a frame in milliseconds; repeatable.
    #[arg(long = "at", default_values_t = [0i64])]
    at: Vec<i64>,
    /// Also write each frame as a PGM image into this directory.
    #[arg(long)]
    pgm_dir: Option<PathBuf>,
    /// Overlay each robot's planned route from its start.
    #[arg(long)]
    paths: bool,
}

#[derive(ClapArgs, Debug)]
struct PreprocessArgs {
    map: PathBuf,
    #[arg(long, default_value_t = 255)]
    cell_width: i64,
    #[arg(long, default_value_t = DEFAULT_OCCUPIED_THRESHOLD)]
    threshold: u8,
    /// pgm or text; inferred from the extension when omitted.
    #[arg(long, value_parser = parse_format)]
    format: Option<MapFormat>,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(ClapArgs, Debug)]
struct ReplayArgs {
    scenario: PathBuf,
    #[arg(long)]
    trace: PathBuf,
}

fn parse_format(s: &str) -> Result<MapFormat, String> {
    match s {
        "pgm" => Ok(MapFormat::Pgm),
        "text" => Ok(MapFormat::Text),
        _ => Err(format!("unknown map format `{s}`, expected pgm or text")),
    }
}

/// Error carrying the exit code it maps to.
struct Failure {
    code: i32,
    error: anyhow::Error,
}

fn config(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_CONFIG, error: error.into() }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_CONFIG
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Check(a) => cmd_check(&a, out, err),
        Command::Simulate(a) => cmd_simulate(&a, out, err),
        Command::Render(a) => cmd_render(&a, out, err),
        Command::Preprocess(a) => cmd_preprocess(&a, out),
        Command::Replay(a) => cmd_replay(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Result<Scenario, Failure> {
    let scenario = load_scenario(path).map_err(config)?;
    for w in &scenario.warnings {
        let _ = writeln!(err, "{w}");
    }
    Ok(scenario)
}

fn write_trace_file(path: &Path, records: &[TraceRecord]) -> Result<(), Failure> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display())).map_err(config)?;
    write_trace(BufWriter::new(file), records).with_context(|| format!("writing {}", path.display())).map_err(config)
}

fn read_trace_file(path: &Path) -> Result<Vec<TraceRecord>, Failure> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display())).map_err(config)?;
    read_trace(BufReader::new(file)).with_context(|| format!("reading {}", path.display())).map_err(config)
}

fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::AllPropertiesHold => EXIT_OK,
        Outcome::BoundReached => EXIT_BOUND,
        _ => EXIT_VIOLATION,
    }
}

fn cmd_check(a: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let model = Model::new(load(&a.scenario, err)?);
    let opts = ExploreOptions {
        max_model_time_ms: a.max_model_time,
        max_states: a.max_states,
        strategy: if a.bfs || a.jobs > 1 { Strategy::Bfs } else { Strategy::Dfs },
        jobs: a.jobs.max(1),
        ..ExploreOptions::default()
    };
    let result = explore(&model, &opts).map_err(config)?;
    let _ = writeln!(out, "{}", Verdict::from(&result).to_json());
    if let (Some(path), Some(labels)) = (&a.trace_out, &result.counterexample) {
        let (_, records) = replay_labels(&model, labels).map_err(config)?;
        write_trace_file(path, &records)?;
        let _ = writeln!(err, "counterexample of {} steps written to {}", records.len(), path.display());
    }
    Ok(exit_code(result.outcome))
}

fn trace_path(base: &Path, seed: u64, runs: u64) -> PathBuf {
    if runs == 1 {
        return base.to_path_buf();
    }
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}.seed{seed}.{}", ext.to_string_lossy()),
        None => format!("{stem}.seed{seed}"),
    };
    base.with_file_name(name)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let model = Model::new(load(&a.scenario, err)?);
    let n = model.robots().len();
    let (mut arrived, mut collided, mut stuck, mut deadlocked, mut bounded) = (0, 0, 0, 0, 0);
    for seed in a.seed..a.seed + a.runs {
        let run = simulate(&model, seed, a.max_model_time).map_err(config)?;
        let reached = run.final_world.robots.iter().filter(|r| r.status == fleetmc::actors::Status::Arrived).count();
        match run.outcome {
            Outcome::AllPropertiesHold => arrived += 1,
            Outcome::Collision => collided += 1,
            Outcome::LivelockStuck => stuck += 1,
            Outcome::Deadlock => deadlocked += 1,
            Outcome::BoundReached => bounded += 1,
        }
        let _ = writeln!(
            out,
            "seed={seed} outcome={} steps={} model_time_ms={} arrived={reached}/{n}",
            run.outcome.as_str(),
            run.trace.len(),
            run.final_world.now_ms,
        );
        if let Some(base) = &a.trace_out {
            write_trace_file(&trace_path(base, seed, a.runs), &run.trace)?;
        }
    }
    let _ = writeln!(
        out,
        "runs={} arrived={arrived} collided={collided} stuck={stuck} deadlocked={deadlocked} bound_reached={bounded}",
        a.runs
    );
    Ok(EXIT_OK)
}

fn cmd_render(a: &RenderArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let model = Model::new(load(&a.scenario, err)?);
    let trace = match &a.trace {
        Some(p) => read_trace_file(p)?,
        None => Vec::new(),
    };
    let end = trace.last().map_or(0, |r| r.time_ms);
    if let Some(dir) = &a.pgm_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display())).map_err(config)?;
    }
    for &t in &a.at {
        if t > end {
            let _ = writeln!(out, "notice: {t} ms is past the end of the trace at {end} ms; showing the last state");
        }
        let prefix = trace.partition_point(|r| r.time_ms <= t);
        let world = replay(&model, &trace[..prefix]).map_err(|e| Failure { code: replay_code(&e), error: e.into() })?;
        let frame = render::Frame::new(&model, &world, a.paths);
        let _ = writeln!(out, "t={t} ms");
        let _ = write!(out, "{}", frame.to_ascii());
        if let Some(dir) = &a.pgm_dir {
            let path = dir.join(format!("frame_{t:08}.pgm"));
            std::fs::write(&path, frame.to_pgm())
                .with_context(|| format!("writing {}", path.display()))
                .map_err(config)?;
        }
    }
    Ok(EXIT_OK)
}

fn replay_code(e: &ReplayError) -> i32 {
    match e {
        ReplayError::ReplayDivergence { .. } => EXIT_VIOLATION,
        ReplayError::Model(_) => EXIT_CONFIG,
    }
}

fn cmd_preprocess(a: &PreprocessArgs, out: &mut dyn Write) -> CmdResult {
    let grid = read_map_file(&a.map, a.format, a.cell_width, a.threshold).map_err(config)?;
    std::fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display())).map_err(config)?;
    let stem = a.map.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "map".into());
    let grid_path = a.out_dir.join(format!("{stem}.grid.txt"));
    let trig_path = a.out_dir.join("trig.csv");
    std::fs::write(&grid_path, grid.to_text())
        .with_context(|| format!("writing {}", grid_path.display()))
        .map_err(config)?;
    std::fs::write(&trig_path, TrigTable::global().to_csv())
        .with_context(|| format!("writing {}", trig_path.display()))
        .map_err(config)?;
    let _ = writeln!(
        out,
        "{}x{} grid, {} occupied cells -> {}",
        grid.width(),
        grid.height(),
        grid.occupied_count(),
        grid_path.display()
    );
    let _ = writeln!(out, "trig table -> {}", trig_path.display());
    Ok(EXIT_OK)
}

fn cmd_replay(a: &ReplayArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let model = Model::new(load(&a.scenario, err)?);
    let trace = read_trace_file(&a.trace)?;
    let world = replay(&model, &trace).map_err(|e| Failure { code: replay_code(&e), error: e.into() })?;
    let state = match classify(&world) {
        StateClass::Violation(o) => o.as_str(),
        StateClass::Success => Outcome::AllPropertiesHold.as_str(),
        StateClass::Open => "OPEN",
    };
    let summary = serde_json::json!({
        "steps": trace.len(),
        "model_time_ms": world.now_ms,
        "state": state,
        "collision_flag": world.map.collision_flag,
    });
    let _ = writeln!(out, "{summary}");
    Ok(EXIT_OK)
}
