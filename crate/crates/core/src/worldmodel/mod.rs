//! Static world: occupancy grids from PGM or text, the fixed-point trig
//! table, and grid/world coordinate conversion.
//!
//! Lengths are integer millimeters and angles integer degrees throughout.

mod grid;
mod trig;

pub use grid::{parse_pgm, parse_text_grid, OccupancyGrid, DEFAULT_OCCUPIED_THRESHOLD};
pub use trig::{precompute_trig, TrigTable};

use crate::geometry::{Cell, Dir, DiscretePose, Vec2};
use crate::num::div_round;
use thiserror::Error;

/// Point in world millimeters.
pub type WorldPoint = Vec2<i64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorldError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("point ({x}, {y}) lies outside the grid")]
    OutOfBounds { x: i64, y: i64 },
}

/// World point of the centre of `cell`, rounded half away from zero.
pub fn cell_center(cell: Cell, cell_width_mm: i64) -> WorldPoint {
    Vec2::new(
        div_round((2 * cell.x as i64 + 1) * cell_width_mm, 2),
        div_round((2 * cell.y as i64 + 1) * cell_width_mm, 2),
    )
}

/// Discretizes a world pose: floor division for the cell, `floor(θ / 45)` for the heading.
pub fn world_to_grid(p: WorldPoint, heading_deg: i32, grid: &OccupancyGrid) -> Result<DiscretePose, WorldError> {
    if p.x < 0 || p.y < 0 || p.x >= grid.width_mm() || p.y >= grid.height_mm() {
        return Err(WorldError::OutOfBounds { x: p.x, y: p.y });
    }
    let cw = grid.cell_width_mm();
    let rdir = Dir::wrapping(heading_deg.rem_euclid(360) / 45);
    Ok(DiscretePose::new((p.x / cw) as i32, (p.y / cw) as i32, rdir))
}

/// Places a discrete pose at its cell centre; heading is `rdir * 45`.
pub fn grid_to_world(pose: DiscretePose, grid: &OccupancyGrid) -> Result<(WorldPoint, i32), WorldError> {
    if !grid.in_bounds(pose.cell()) {
        return Err(WorldError::OutOfBounds { x: pose.rx as i64, y: pose.ry as i64 });
    }
    Ok((cell_center(pose.cell(), grid.cell_width_mm()), pose.rdir.degrees()))
}
