use crate::num::FIXED_SCALE;
use std::fmt::Write as _;
use std::sync::OnceLock;

/// Cosine, sine and tangent of every integer degree, scaled by 10^4 and
/// rounded half away from zero. Tangent is undefined at 90° and 270°.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrigTable {
    cos_x1e4: Vec<i64>,
    sin_x1e4: Vec<i64>,
    tan_x1e4: Vec<Option<i64>>,
}

pub fn precompute_trig() -> TrigTable {
    let scale = FIXED_SCALE as f64;
    let mut cos_x1e4 = Vec::with_capacity(360);
    let mut sin_x1e4 = Vec::with_capacity(360);
    let mut tan_x1e4 = Vec::with_capacity(360);
    for deg in 0..360 {
        let rad = (deg as f64).to_radians();
        cos_x1e4.push((rad.cos() * scale).round() as i64);
        sin_x1e4.push((rad.sin() * scale).round() as i64);
        tan_x1e4.push(if deg % 180 == 90 { None } else { Some((rad.tan() * scale).round() as i64) });
    }
    // Exact values at the axes; f64 leaves e.g. cos(90°) at 6e-17.
    for (deg, c, s) in [(0, 1, 0), (90, 0, 1), (180, -1, 0), (270, 0, -1)] {
        cos_x1e4[deg] = c * FIXED_SCALE;
        sin_x1e4[deg] = s * FIXED_SCALE;
    }
    TrigTable { cos_x1e4, sin_x1e4, tan_x1e4 }
}

impl TrigTable {
    /// Process-wide shared table.
    pub fn global() -> &'static TrigTable {
        static TABLE: OnceLock<TrigTable> = OnceLock::new();
        TABLE.get_or_init(precompute_trig)
    }

    pub fn cos(&self, deg: i32) -> i64 {
        self.cos_x1e4[deg.rem_euclid(360) as usize]
    }

    pub fn sin(&self, deg: i32) -> i64 {
        self.sin_x1e4[deg.rem_euclid(360) as usize]
    }

    pub fn tan(&self, deg: i32) -> Option<i64> {
        self.tan_x1e4[deg.rem_euclid(360) as usize]
    }

    /// `degree,cos_x1e4,sin_x1e4,tan_x1e4` with a header row; undefined
    /// tangents are written as `undefined`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("degree,cos_x1e4,sin_x1e4,tan_x1e4\n");
        for d in 0..360 {
            let tan = self.tan_x1e4[d].map_or_else(|| "undefined".to_string(), |t| t.to_string());
            let _ = writeln!(s, "{d},{},{},{tan}", self.cos_x1e4[d], self.sin_x1e4[d]);
        }
        s
    }
}
