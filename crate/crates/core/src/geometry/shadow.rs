use super::{rects_intersect, DiscretePose, Rect, Vec2};
use crate::num::{div_round, FIXED_SCALE};
use crate::worldmodel::{cell_center, OccupancyGrid, TrigTable};
use serde::{Deserialize, Serialize};

/// Robot shadow: footprint rectangle plus safety margin, in world millimeters.
pub type Shadow = Rect<i64>;

/// Rectangular robot outline. `length_mm` runs along the heading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Footprint {
    pub length_mm: i64,
    pub width_mm: i64,
    #[serde(default)]
    pub safety_margin_mm: i64,
}

impl Footprint {
    pub fn new(length_mm: i64, width_mm: i64, safety_margin_mm: i64) -> Self {
        Footprint { length_mm, width_mm, safety_margin_mm }
    }

    pub fn padded_length(&self) -> i64 {
        self.length_mm + 2 * self.safety_margin_mm
    }

    pub fn padded_width(&self) -> i64 {
        self.width_mm + 2 * self.safety_margin_mm
    }

    /// Half-width of the frontal corridor used for blocking-obstacle tests.
    pub fn corridor_half_width(&self) -> i64 {
        div_round(self.width_mm, 2) + self.safety_margin_mm
    }

    /// Upper bound on the distance from the centre to any shadow corner.
    pub fn circumradius(&self) -> i64 {
        let l = self.padded_length();
        let w = self.padded_width();
        ((l * l + w * w) as f64).sqrt().ceil() as i64 / 2 + 2
    }
}

/// Shadow of a robot at `center` with heading `heading_deg`.
pub fn shadow_at(center: Vec2<i64>, heading_deg: i32, fp: &Footprint) -> Shadow {
    let trig = TrigTable::global();
    let (c, s) = (trig.cos(heading_deg), trig.sin(heading_deg));
    let lt = fp.padded_length();
    let wt = fp.padded_width();
    let scale = 2 * FIXED_SCALE;
    let a = Vec2::new(div_round(lt * c, scale), div_round(lt * s, scale));
    let b = Vec2::new(div_round(-wt * s, scale), div_round(wt * c, scale));
    Rect::from_center_axes(center, a, b)
}

/// Shadow of a robot placed at the centre of its cell.
pub fn shadow_of(pose: DiscretePose, fp: &Footprint, grid: &OccupancyGrid) -> Shadow {
    shadow_at(cell_center(pose.cell(), grid.cell_width_mm()), pose.rdir.degrees(), fp)
}

pub fn shadows_intersect(a: &Shadow, b: &Shadow) -> bool {
    rects_intersect(a, b)
}

pub fn check_collision(
    pose_a: DiscretePose,
    fp_a: &Footprint,
    pose_b: DiscretePose,
    fp_b: &Footprint,
    grid: &OccupancyGrid,
) -> bool {
    shadows_intersect(&shadow_of(pose_a, fp_a, grid), &shadow_of(pose_b, fp_b, grid))
}
