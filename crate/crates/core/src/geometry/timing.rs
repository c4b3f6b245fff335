use super::{Dir, DiscretePose, GeometryError};
use crate::num::{div_round, SQRT2_FIXED};

/// Time for a single hop between 8-adjacent cells, at least 1 ms.
pub fn move_duration_ms(
    from: DiscretePose,
    to: DiscretePose,
    speed_mm_s: i64,
    cell_width_mm: i64,
) -> Result<i64, GeometryError> {
    let dx = (to.rx - from.rx).abs();
    let dy = (to.ry - from.ry).abs();
    if dx > 1 || dy > 1 || dx + dy == 0 {
        return Err(GeometryError::InvalidHop { from: from.cell(), to: to.cell() });
    }
    Ok(hop_duration_ms(dx + dy == 2, speed_mm_s, cell_width_mm))
}

/// Edge hop `cw·1000/v`, diagonal hop `cw·√2·1000/v` with √2 at 10^4 scale.
pub fn hop_duration_ms(diagonal: bool, speed_mm_s: i64, cell_width_mm: i64) -> i64 {
    assert!(speed_mm_s > 0, "speed must be positive");
    let ms = if diagonal {
        div_round(cell_width_mm * SQRT2_FIXED, speed_mm_s * 10)
    } else {
        div_round(cell_width_mm * 1000, speed_mm_s)
    };
    ms.max(1)
}

/// Time to turn between two headings the shorter way.
pub fn rotate_duration_ms(from: Dir, to: Dir, angular_speed_deg_s: i64) -> i64 {
    assert!(angular_speed_deg_s > 0, "angular speed must be positive");
    let angle = from.steps_between(to) as i64 * 45;
    div_round(angle * 1000, angular_speed_deg_s)
}
