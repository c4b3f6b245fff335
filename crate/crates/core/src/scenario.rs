//! Scenario files: map reference, per-robot parameters with defaults, and
//! load-time validation.

use crate::geometry::{check_collision, hop_duration_ms, Cell, Dir, DiscretePose, Footprint};
use crate::planner::inflate_grid;
use crate::sensing::ScanParams;
use crate::worldmodel::{parse_pgm, parse_text_grid, OccupancyGrid, WorldError, DEFAULT_OCCUPIED_THRESHOLD};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("invalid scenario at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("map: {0}")]
    Map(#[from] WorldError),
    #[error("{0}")]
    Invalid(String),
}

/// Fully resolved robot parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RobotParams {
    pub footprint: Footprint,
    pub speed_mm_s: i64,
    pub angular_speed_deg_s: i64,
    pub scan_period_ms: i64,
    pub fov_deg: i32,
    pub beam_step_deg: i32,
    pub max_range_mm: i64,
    pub stop_zone_mm: i64,
    pub wait_increment_ms: i64,
    pub max_wait_ms: i64,
    pub max_reroutes: u32,
    pub arrival_tolerance_mm: i64,
}

impl RobotParams {
    /// Built-in defaults; the arrival tolerance is one cell.
    pub fn defaults(cell_width_mm: i64) -> Self {
        RobotParams {
            footprint: Footprint::new(400, 400, 0),
            speed_mm_s: 1000,
            angular_speed_deg_s: 90,
            scan_period_ms: 100,
            fov_deg: 360,
            beam_step_deg: 2,
            max_range_mm: 10_000,
            stop_zone_mm: 500,
            wait_increment_ms: 100,
            max_wait_ms: 1000,
            max_reroutes: 10,
            arrival_tolerance_mm: cell_width_mm,
        }
    }

    pub fn scan_params(&self) -> ScanParams {
        ScanParams { fov_deg: self.fov_deg, beam_step_deg: self.beam_step_deg, max_range_mm: self.max_range_mm }
    }

    fn validate(&self) -> Result<(), String> {
        let fp = &self.footprint;
        let checks = [
            (fp.length_mm > 0 && fp.width_mm > 0, "footprint dimensions must be positive"),
            (fp.safety_margin_mm >= 0, "safety margin must be non-negative"),
            (self.speed_mm_s > 0, "speed_mm_s must be positive"),
            (self.angular_speed_deg_s > 0, "angular_speed_deg_s must be positive"),
            (self.scan_period_ms > 0, "scan_period_ms must be positive"),
            (self.stop_zone_mm >= 0, "stop_zone_mm must be non-negative"),
            (self.wait_increment_ms > 0, "wait_increment_ms must be positive"),
            (self.max_wait_ms >= 0, "max_wait_ms must be non-negative"),
            (self.arrival_tolerance_mm >= 0, "arrival_tolerance_mm must be non-negative"),
        ];
        if let Some((_, msg)) = checks.iter().find(|(ok, _)| !ok) {
            return Err(msg.to_string());
        }
        self.scan_params().validate().map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RobotConfig {
    pub id: u16,
    pub start: Cell,
    pub start_dir: Dir,
    pub goal: Cell,
    pub params: RobotParams,
}

impl RobotConfig {
    pub fn start_pose(&self) -> DiscretePose {
        DiscretePose::at(self.start, self.start_dir)
    }
}

/// Validated scenario ready for checking or simulation.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub grid: Arc<OccupancyGrid>,
    pub robots: Vec<RobotConfig>,
    pub service_latency_ms: i64,
    pub warnings: Vec<String>,
}

/// Whether an edge hop is too fast for the scan rate: `hop ≤ 2 · scan_period`.
pub fn violates_scan_rate_guard(params: &RobotParams, cell_width_mm: i64) -> bool {
    hop_duration_ms(false, params.speed_mm_s, cell_width_mm) <= 2 * params.scan_period_ms
}

impl Scenario {
    /// Validates robots against the grid; robots are ordered by id.
    pub fn new(
        grid: OccupancyGrid,
        mut robots: Vec<RobotConfig>,
        service_latency_ms: i64,
    ) -> Result<Self, ConfigError> {
        if robots.is_empty() {
            return Err(ConfigError::Invalid("scenario has no robots".into()));
        }
        if service_latency_ms < 0 {
            return Err(ConfigError::Invalid("service_latency_ms must be non-negative".into()));
        }
        robots.sort_by_key(|r| r.id);
        let mut warnings = Vec::new();
        let mut ids = BTreeSet::new();
        let cw = grid.cell_width_mm();
        for r in &robots {
            if r.id == 0 {
                return Err(ConfigError::Invalid("robot id 0 is reserved for the map server".into()));
            }
            if !ids.insert(r.id) {
                return Err(ConfigError::Invalid(format!("duplicate robot id {}", r.id)));
            }
            r.params.validate().map_err(|m| ConfigError::Invalid(format!("robot {}: {m}", r.id)))?;
            let inflated = inflate_grid(&grid, &r.params.footprint);
            for (what, c) in [("start", r.start), ("goal", r.goal)] {
                if !grid.in_bounds(c) {
                    return Err(ConfigError::Invalid(format!("robot {}: {what} {c} is outside the map", r.id)));
                }
                if inflated.is_occupied(c) {
                    return Err(ConfigError::Invalid(format!(
                        "robot {}: {what} {c} is not free on the inflated grid",
                        r.id
                    )));
                }
            }
            if violates_scan_rate_guard(&r.params, cw) {
                warnings.push(format!(
                    "WARN robot {}: edge hop {} ms is not greater than twice the scan period {} ms",
                    r.id,
                    hop_duration_ms(false, r.params.speed_mm_s, cw),
                    r.params.scan_period_ms
                ));
            }
        }
        for (i, a) in robots.iter().enumerate() {
            for b in &robots[i + 1..] {
                if check_collision(a.start_pose(), &a.params.footprint, b.start_pose(), &b.params.footprint, &grid) {
                    return Err(ConfigError::Invalid(format!(
                        "robots {} and {} collide at their start poses",
                        a.id, b.id
                    )));
                }
            }
        }
        Ok(Scenario { grid: Arc::new(grid), robots, service_latency_ms, warnings })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    map: RawMap,
    #[serde(default)]
    defaults: RawParams,
    #[serde(default)]
    service_latency_ms: i64,
    robots: Vec<RawRobot>,
}

#[derive(Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum MapFormat {
    Pgm,
    Text,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMap {
    source: Option<PathBuf>,
    rows: Option<Vec<String>>,
    format: Option<MapFormat>,
    cell_width_mm: i64,
    #[serde(default = "default_threshold")]
    occupied_threshold: u8,
}

fn default_threshold() -> u8 {
    DEFAULT_OCCUPIED_THRESHOLD
}

#[derive(Deserialize, Default, Clone)]
struct RawParams {
    footprint: Option<Footprint>,
    speed_mm_s: Option<i64>,
    angular_speed_deg_s: Option<i64>,
    scan_period_ms: Option<i64>,
    fov_deg: Option<i32>,
    beam_step_deg: Option<i32>,
    max_range_mm: Option<i64>,
    stop_zone_mm: Option<i64>,
    wait_increment_ms: Option<i64>,
    max_wait_ms: Option<i64>,
    max_reroutes: Option<u32>,
    arrival_tolerance_mm: Option<i64>,
    #[serde(flatten)]
    unknown: BTreeMap<String, serde_json::Value>,
}

impl RawParams {
    fn apply(&self, p: &mut RobotParams) {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { p.$f = v; } )* };
        }
        take!(
            footprint,
            speed_mm_s,
            angular_speed_deg_s,
            scan_period_ms,
            fov_deg,
            beam_step_deg,
            max_range_mm,
            stop_zone_mm,
            wait_increment_ms,
            max_wait_ms,
            max_reroutes,
            arrival_tolerance_mm
        );
    }

    fn reject_unknown(&self, at: &str) -> Result<(), ConfigError> {
        match self.unknown.keys().next() {
            Some(k) => Err(ConfigError::Schema { path: format!("{at}.{k}"), message: "unknown field".into() }),
            None => Ok(()),
        }
    }
}

#[derive(Deserialize)]
struct RawRobot {
    id: u16,
    start: Cell,
    #[serde(default)]
    start_dir: Dir,
    goal: Cell,
    #[serde(flatten)]
    params: RawParams,
}

/// Parses scenario JSON; map sources resolve relative to `base_dir`.
pub fn parse_scenario(json: &str, base_dir: &Path) -> Result<Scenario, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let raw: RawScenario = serde_path_to_error::deserialize(de)
        .map_err(|e| ConfigError::Schema { path: e.path().to_string(), message: e.inner().to_string() })?;
    raw.defaults.reject_unknown("defaults")?;
    let grid = load_map(&raw.map, base_dir)?;
    let mut base = RobotParams::defaults(grid.cell_width_mm());
    raw.defaults.apply(&mut base);
    let mut robots = Vec::with_capacity(raw.robots.len());
    for (i, r) in raw.robots.iter().enumerate() {
        r.params.reject_unknown(&format!("robots[{i}]"))?;
        let mut params = base;
        r.params.apply(&mut params);
        robots.push(RobotConfig { id: r.id, start: r.start, start_dir: r.start_dir, goal: r.goal, params });
    }
    Scenario::new(grid, robots, raw.service_latency_ms)
}

fn load_map(map: &RawMap, base_dir: &Path) -> Result<OccupancyGrid, ConfigError> {
    if map.cell_width_mm <= 0 {
        return Err(ConfigError::Schema { path: "map.cell_width_mm".into(), message: "must be positive".into() });
    }
    match (&map.source, &map.rows) {
        (Some(src), None) => read_map_file(&base_dir.join(src), map.format, map.cell_width_mm, map.occupied_threshold),
        (None, Some(rows)) => Ok(parse_text_grid(&rows.join("\n"), map.cell_width_mm)?),
        _ => Err(ConfigError::Schema {
            path: "map".into(),
            message: "exactly one of `source` or `rows` is required".into(),
        }),
    }
}

/// Reads a map file. Without an explicit format, `.pgm` files are parsed as
/// PGM and anything else as a text grid.
pub fn read_map_file(
    path: &Path,
    format: Option<MapFormat>,
    cell_width_mm: i64,
    occupied_threshold: u8,
) -> Result<OccupancyGrid, ConfigError> {
    let bytes = std::fs::read(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    let is_pgm = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    match format.unwrap_or(if is_pgm { MapFormat::Pgm } else { MapFormat::Text }) {
        MapFormat::Pgm => Ok(parse_pgm(&bytes, cell_width_mm, occupied_threshold)?),
        MapFormat::Text => {
            let text =
                String::from_utf8(bytes).map_err(|_| WorldError::Parse("text grid is not valid UTF-8".into()))?;
            Ok(parse_text_grid(&text, cell_width_mm)?)
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_scenario(&text, path.parent().unwrap_or(Path::new(".")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(json: &str) -> Result<Scenario, ConfigError> {
        parse_scenario(json, Path::new("."))
    }

    const MAP: &str = r#""map": {"rows": ["00000000", "00000000", "00000000", "00000000"], "cell_width_mm": 255}"#;

    #[test]
    fn minimal_scenario_uses_defaults() {
        let s = parse(&format!(r#"{{{MAP}, "robots": [{{"id": 1, "start": [0, 0], "goal": [5, 2]}}]}}"#)).unwrap();
        assert!(s.warnings.is_empty());
        assert_eq!(s.robots[0].params, RobotParams::defaults(255));
        assert_eq!(s.robots[0].params.arrival_tolerance_mm, 255);
    }

    #[test]
    fn defaults_then_overrides() {
        let s = parse(&format!(
            r#"{{{MAP}, "defaults": {{"speed_mm_s": 800, "stop_zone_mm": 300}},
                "robots": [{{"id": 2, "start": [0, 0], "goal": [5, 2], "stop_zone_mm": 200}}]}}"#
        ))
        .unwrap();
        assert_eq!(s.robots[0].params.speed_mm_s, 800);
        assert_eq!(s.robots[0].params.stop_zone_mm, 200);
    }

    #[test]
    fn fast_robot_warns() {
        let s = parse(&format!(
            r#"{{{MAP}, "robots": [{{"id": 1, "start": [0, 0], "goal": [5, 2], "speed_mm_s": 1500}}]}}"#
        ))
        .unwrap();
        assert_eq!(s.warnings.len(), 1);
        assert!(s.warnings[0].contains("170 ms"));
    }

    #[test]
    fn shared_start_is_rejected() {
        let err = parse(&format!(
            r#"{{{MAP}, "robots": [{{"id": 1, "start": [0, 0], "goal": [5, 2]}}, {{"id": 2, "start": [0, 0], "goal": [7, 3]}}]}}"#
        ))
        .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)), "{err}");
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = parse(&format!(r#"{{{MAP}, "robots": [{{"id": 1, "start": [0], "goal": [5, 2]}}]}}"#)).unwrap_err();
        match err {
            ConfigError::Schema { path, .. } => assert!(path.starts_with("robots[0]"), "{path}"),
            other => panic!("{other}"),
        }
        let err = parse(&format!(r#"{{{MAP}, "robots": [{{"id": 1, "start": [0, 0], "goal": [5, 2], "sped": 3}}]}}"#))
            .unwrap_err();
        assert!(matches!(err, ConfigError::Schema { ref path, .. } if path == "robots[0].sped"));
    }

    #[test]
    fn missing_map_file() {
        let err = parse(r#"{"map": {"source": "nope.pgm", "cell_width_mm": 255}, "robots": []}"#).unwrap_err();
        assert!(matches!(err, ConfigError::Io { .. }));
    }

    #[test]
    fn goal_on_wall_is_rejected() {
        let err = parse(
            r#"{"map": {"rows": ["0000", "0001"], "cell_width_mm": 255},
                "robots": [{"id": 1, "start": [0, 0], "goal": [2, 1]}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)));
    }

    #[test]
    fn guard_boundary() {
        let mut p = RobotParams::defaults(255);
        p.speed_mm_s = 1275;
        assert!(violates_scan_rate_guard(&p, 255));
        p.speed_mm_s = 1271;
        assert!(!violates_scan_rate_guard(&p, 255));
    }
}
