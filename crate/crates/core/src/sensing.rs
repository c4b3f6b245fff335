//! Simulated LIDAR: ray marching against the static grid and other robots'
//! shadows, and the frontal-corridor blocking test.

use crate::geometry::{Cell, Dir, DiscretePose, Footprint, Shadow, Vec2};
use crate::num::{div_round, FIXED_SCALE};
use crate::worldmodel::{cell_center, OccupancyGrid, TrigTable, WorldPoint};
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SensingError {
    #[error("ray origin ({x}, {y}) lies outside the grid")]
    OutOfBounds { x: i64, y: i64 },
    #[error("heading {heading_deg}° is outside the scanned field of view")]
    DirectionNotScanned { heading_deg: i32 },
    #[error("invalid scan parameters: {0}")]
    InvalidParams(String),
}

/// Laser configuration of one robot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScanParams {
    pub fov_deg: i32,
    pub beam_step_deg: i32,
    pub max_range_mm: i64,
}

impl ScanParams {
    pub fn validate(&self) -> Result<(), SensingError> {
        if self.beam_step_deg <= 0 || self.beam_step_deg > 360 {
            return Err(SensingError::InvalidParams(format!("beam step {}°", self.beam_step_deg)));
        }
        if self.fov_deg <= 0 || self.fov_deg > 360 || self.fov_deg % self.beam_step_deg != 0 {
            return Err(SensingError::InvalidParams(format!(
                "field of view {}° must be a positive multiple of the beam step, at most 360°",
                self.fov_deg
            )));
        }
        if self.max_range_mm <= 0 {
            return Err(SensingError::InvalidParams("max range must be positive".into()));
        }
        Ok(())
    }

    pub fn beam_count(&self) -> usize {
        (self.fov_deg / self.beam_step_deg) as usize
    }
}

/// Nearest-obstacle distance per beam from one scan. Beam `i` points at
/// `start_deg + i * beam_step_deg`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ObstacleMatrix {
    pub beam_step_deg: i32,
    pub fov_deg: i32,
    pub start_deg: i32,
    pub max_range_mm: i64,
    pub scan_time_ms: i64,
    pub distances: Vec<i64>,
}

impl ObstacleMatrix {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    pub fn angle(&self, i: usize) -> i32 {
        (self.start_deg + i as i32 * self.beam_step_deg).rem_euclid(360)
    }

    /// `(absolute angle, distance)` per beam.
    pub fn entries(&self) -> impl Iterator<Item = (i32, i64)> + '_ {
        self.distances.iter().enumerate().map(|(i, &d)| (self.angle(i), d))
    }

    /// Distance recorded on the beam at exactly `angle_deg`, if any.
    pub fn distance_at(&self, angle_deg: i32) -> Option<i64> {
        let off = (angle_deg - self.start_deg).rem_euclid(360);
        if off % self.beam_step_deg != 0 {
            return None;
        }
        self.distances.get((off / self.beam_step_deg) as usize).copied()
    }

    pub fn covers(&self, angle_deg: i32) -> bool {
        self.fov_deg >= 360 || (angle_deg - self.start_deg).rem_euclid(360) < self.fov_deg
    }
}

pub fn march_step(cell_width_mm: i64) -> i64 {
    div_round(cell_width_mm, 4).max(1)
}

fn march_point(origin: WorldPoint, d: i64, cos: i64, sin: i64) -> WorldPoint {
    Vec2::new(origin.x + div_round(d * cos, FIXED_SCALE), origin.y + div_round(d * sin, FIXED_SCALE))
}

fn statically_occupied(grid: &OccupancyGrid, p: WorldPoint) -> bool {
    let cw = grid.cell_width_mm();
    if p.x < 0 || p.y < 0 || p.x >= grid.width_mm() || p.y >= grid.height_mm() {
        return false;
    }
    grid.is_occupied(Cell::new((p.x / cw) as i32, (p.y / cw) as i32))
}

/// Marches along the ray in quarter-cell steps starting one step out from the
/// origin. A step hits when its point lies in an occupied cell or inside one of
/// `others`. Points outside the grid are free.
pub fn ray_cast(
    grid: &OccupancyGrid,
    origin: WorldPoint,
    angle_deg: i32,
    others: &[Shadow],
    max_range_mm: i64,
) -> Result<i64, SensingError> {
    if origin.x < 0 || origin.y < 0 || origin.x >= grid.width_mm() || origin.y >= grid.height_mm() {
        return Err(SensingError::OutOfBounds { x: origin.x, y: origin.y });
    }
    let trig = TrigTable::global();
    let (c, s) = (trig.cos(angle_deg), trig.sin(angle_deg));
    let step = march_step(grid.cell_width_mm());
    let mut d = step;
    while d <= max_range_mm {
        let p = march_point(origin, d, c, s);
        if statically_occupied(grid, p) || others.iter().any(|o| o.contains(p)) {
            return Ok(d);
        }
        d += step;
    }
    Ok(max_range_mm)
}

/// Beams of a scan: `fov/step` angles from `heading − fov/2` inclusive.
pub fn beam_angles(heading_deg: i32, params: &ScanParams) -> impl Iterator<Item = i32> {
    let start = heading_deg - params.fov_deg / 2;
    let step = params.beam_step_deg;
    (0..params.beam_count() as i32).map(move |i| (start + i * step).rem_euclid(360))
}

/// One ray per beam from the centre of the scanning robot's cell.
pub fn scan_obstacles(
    grid: &OccupancyGrid,
    pose: DiscretePose,
    others: &[Shadow],
    params: &ScanParams,
    scan_time_ms: i64,
) -> Result<ObstacleMatrix, SensingError> {
    params.validate()?;
    let origin = cell_center(pose.cell(), grid.cell_width_mm());
    let heading = pose.rdir.degrees();
    let distances = beam_angles(heading, params)
        .map(|a| ray_cast(grid, origin, a, others, params.max_range_mm))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ObstacleMatrix {
        beam_step_deg: params.beam_step_deg,
        fov_deg: params.fov_deg,
        start_deg: (heading - params.fov_deg / 2).rem_euclid(360),
        max_range_mm: params.max_range_mm,
        scan_time_ms,
        distances,
    })
}

/// Smallest beam distance whose hit point lies ahead of the robot and within
/// the frontal corridor of half-width `width/2 + margin`.
pub fn nearest_blocking_distance(m: &ObstacleMatrix, heading: Dir, fp: &Footprint) -> Result<i64, SensingError> {
    let heading_deg = heading.degrees();
    if !m.covers(heading_deg) {
        return Err(SensingError::DirectionNotScanned { heading_deg });
    }
    let trig = TrigTable::global();
    let half = fp.corridor_half_width();
    let mut best = m.max_range_mm;
    for (angle, d) in m.entries() {
        if d >= best {
            continue;
        }
        let phi = (angle - heading_deg).rem_euclid(360);
        if (90..=270).contains(&phi) {
            continue;
        }
        if d * trig.sin(phi).abs() <= half * FIXED_SCALE {
            best = d;
        }
    }
    Ok(best)
}

/// Lazily filled per-cell table of the first static hit along every integer
/// degree, for rays cast from cell centres. Results equal [`ray_cast`] with no
/// other robots.
#[derive(Debug)]
pub struct StaticRayTable {
    grid: Arc<OccupancyGrid>,
    step: i64,
    cells: Vec<OnceLock<Box<[u32]>>>,
}

const NO_HIT: u32 = u32::MAX;

impl StaticRayTable {
    pub fn new(grid: Arc<OccupancyGrid>) -> Self {
        let n = grid.cells().len();
        let step = march_step(grid.cell_width_mm());
        StaticRayTable { grid, step, cells: (0..n).map(|_| OnceLock::new()).collect() }
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.grid
    }

    fn row(&self, cell: Cell) -> &[u32] {
        let idx = self.grid.index(cell).expect("cell inside grid");
        self.cells[idx].get_or_init(|| {
            let origin = cell_center(cell, self.grid.cell_width_mm());
            let trig = TrigTable::global();
            (0..360)
                .map(|a| {
                    let (c, s) = (trig.cos(a), trig.sin(a));
                    let mut k: u32 = 1;
                    loop {
                        let p = march_point(origin, k as i64 * self.step, c, s);
                        if p.x < 0 || p.y < 0 || p.x >= self.grid.width_mm() || p.y >= self.grid.height_mm() {
                            // The grid is convex, so a ray never re-enters it.
                            break NO_HIT;
                        }
                        if statically_occupied(&self.grid, p) {
                            break k;
                        }
                        k += 1;
                    }
                })
                .collect()
        })
    }

    /// Same result as [`ray_cast`] from the centre of `cell`.
    pub fn cast(&self, cell: Cell, angle_deg: i32, others: &[Shadow], max_range_mm: i64) -> i64 {
        let angle = angle_deg.rem_euclid(360);
        let step = self.step;
        let k_static = self.row(cell)[angle as usize];
        let k_range = (max_range_mm / step) as u32;
        let mut k_best = if k_static == NO_HIT { k_range + 1 } else { k_static.min(k_range + 1) };
        if !others.is_empty() {
            let origin = cell_center(cell, self.grid.cell_width_mm());
            let trig = TrigTable::global();
            let (c, s) = (trig.cos(angle), trig.sin(angle));
            let (ux, uy) = (c as f64 / FIXED_SCALE as f64, s as f64 / FIXED_SCALE as f64);
            for o in others {
                let Some((lo, hi)) = shadow_k_window(origin, ux, uy, step, o) else { continue };
                let hi = hi.min(k_best.saturating_sub(1));
                for k in lo.max(1)..=hi {
                    if o.contains(march_point(origin, k as i64 * step, c, s)) {
                        k_best = k;
                        break;
                    }
                }
            }
        }
        if k_best > k_range {
            max_range_mm
        } else {
            k_best as i64 * step
        }
    }

    pub fn scan(
        &self,
        pose: DiscretePose,
        others: &[Shadow],
        params: &ScanParams,
        scan_time_ms: i64,
    ) -> Result<ObstacleMatrix, SensingError> {
        params.validate()?;
        if !self.grid.in_bounds(pose.cell()) {
            return Err(SensingError::OutOfBounds { x: pose.rx as i64, y: pose.ry as i64 });
        }
        let heading = pose.rdir.degrees();
        let distances =
            beam_angles(heading, params).map(|a| self.cast(pose.cell(), a, others, params.max_range_mm)).collect();
        Ok(ObstacleMatrix {
            beam_step_deg: params.beam_step_deg,
            fov_deg: params.fov_deg,
            start_deg: (heading - params.fov_deg / 2).rem_euclid(360),
            max_range_mm: params.max_range_mm,
            scan_time_ms,
            distances,
        })
    }
}

/// Range of march indices whose points can fall inside `shadow`, from a
/// slackened bounding-circle test. `None` when the ray misses the circle.
fn shadow_k_window(origin: WorldPoint, ux: f64, uy: f64, step: i64, shadow: &Shadow) -> Option<(u32, u32)> {
    let c0 = shadow.corners[0];
    let c2 = shadow.corners[2];
    let cx = (c0.x + c2.x) as f64 / 2.0;
    let cy = (c0.y + c2.y) as f64 / 2.0;
    let r = shadow
        .corners
        .iter()
        .map(|p| ((p.x as f64 - cx).powi(2) + (p.y as f64 - cy).powi(2)).sqrt())
        .fold(0.0, f64::max)
        + 3.0;
    let (ox, oy) = (cx - origin.x as f64, cy - origin.y as f64);
    // |t·u − o|² ≤ r², with |u| ≈ 1 up to fixed-point error covered by the slack.
    let b = ox * ux + oy * uy;
    let disc = b * b - (ox * ox + oy * oy - r * r);
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let (t0, t1) = (b - sq, b + sq);
    if t1 < 0.0 {
        return None;
    }
    let lo = (t0 / step as f64).floor().max(1.0) as u32;
    let hi = (t1 / step as f64).ceil() as u32 + 1;
    Some((lo, hi))
}
