//! Discrete poses, footprints, shadows, the collision predicate and
//! motion timing.

mod pose;
mod shadow;
mod shape;
mod timing;

pub use pose::{Cell, Dir, DiscretePose};
pub use shadow::{check_collision, shadow_at, shadow_of, shadows_intersect, Footprint, Shadow};
pub use shape::{rects_intersect, Rect, Vec2};
pub use timing::{hop_duration_ms, move_duration_ms, rotate_duration_ms};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("cells {from} and {to} are not 8-adjacent")]
    InvalidHop { from: Cell, to: Cell },
}
