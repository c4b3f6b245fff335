use fleetmc::geometry::{Footprint, Rect, Vec2};
use fleetmc::{PointF, RectF, Shadow};

/// `(cos, sin, tan)` of `deg` scaled by 10^4, unrounded. Tangent is `None`
/// where it is undefined.
pub fn trig_reference(deg: i32) -> (f64, f64, Option<f64>) {
    let rad = (deg as f64).to_radians();
    let tan = if deg.rem_euclid(180) == 90 { None } else { Some(rad.tan() * 1e4) };
    (rad.cos() * 1e4, rad.sin() * 1e4, tan)
}

pub fn to_f64(r: &Shadow) -> RectF {
    Rect { corners: r.corners.map(|c| Vec2::new(c.x as f64, c.y as f64)) }
}

/// Shadow computed with unrounded trigonometry.
pub fn exact_shadow(center: PointF, heading_deg: f64, fp: &Footprint) -> RectF {
    let (s, c) = heading_deg.to_radians().sin_cos();
    let hl = fp.padded_length() as f64 / 2.0;
    let hw = fp.padded_width() as f64 / 2.0;
    Rect::from_center_axes(center, Vec2::new(hl * c, hl * s), Vec2::new(-hw * s, hw * c))
}

fn segment_distance(p: PointF, a: PointF, b: PointF) -> f64 {
    let ab = b - a;
    let len = ab.norm_sq();
    let t = if len == 0.0 { 0.0 } else { ((p - a).dot(ab) / len).clamp(0.0, 1.0) };
    let q = a + ab * t;
    (p - q).norm_sq().sqrt()
}

fn boundary_distance(r: &RectF, p: PointF) -> f64 {
    (0..4).map(|i| segment_distance(p, r.corners[i], r.corners[(i + 1) % 4])).fold(f64::INFINITY, f64::min)
}

fn boundary_samples(r: &RectF, spacing: f64) -> impl Iterator<Item = PointF> + '_ {
    (0..4).flat_map(move |i| {
        let a = r.corners[i];
        let b = r.corners[(i + 1) % 4];
        let n = (((b - a).norm_sq().sqrt() / spacing).ceil() as usize).max(1);
        (0..n).map(move |k| a + (b - a) * (k as f64 / n as f64))
    })
}

/// Result of sampling both boundaries against the other rectangle.
#[derive(Clone, Copy, Debug)]
pub struct SampledIntersection {
    /// Some sample lies inside (or on) the other rectangle.
    pub hit: bool,
    /// Deepest penetration of a sample into the other rectangle, 0 without a hit.
    pub depth: f64,
    /// Smallest gap between a sample and the other rectangle, 0 with a hit.
    pub gap: f64,
}

/// Two convex shapes meet iff a boundary point of one lies in the other, so
/// sampling both boundaries at `spacing` decides intersection up to about
/// `spacing` of slack.
pub fn sampled_intersection(a: &RectF, b: &RectF, spacing: f64) -> SampledIntersection {
    let mut out = SampledIntersection { hit: false, depth: 0.0, gap: f64::INFINITY };
    for (r, other) in [(a, b), (b, a)] {
        for p in boundary_samples(r, spacing) {
            let d = boundary_distance(other, p);
            if other.contains(p) {
                out.hit = true;
                out.depth = out.depth.max(d);
                out.gap = 0.0;
            } else {
                out.gap = out.gap.min(d);
            }
        }
    }
    out
}

/// Moves a robot continuously from `from` to `to` and returns the travelled
/// distance of the first sample at which its exact shadow meets `other`.
pub fn sweep_first_contact(
    from: PointF,
    to: PointF,
    heading_deg: f64,
    fp: &Footprint,
    other: &RectF,
    step_mm: f64,
) -> Option<f64> {
    let len = (to - from).norm_sq().sqrt();
    let n = (len / step_mm).ceil() as usize;
    (0..=n).find_map(|k| {
        let t = if n == 0 { 0.0 } else { k as f64 / n as f64 };
        let rect = exact_shadow(from + (to - from) * t, heading_deg, fp);
        sampled_intersection(&rect, other, step_mm).hit.then_some(len * t)
    })
}
