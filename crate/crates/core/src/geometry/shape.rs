//! Scalar-generic 2D vectors and oriented rectangles with a separating-axis
//! intersection test.

use crate::num::Scalar;
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    /// Counter-clockwise perpendicular.
    pub fn perp(self) -> Self {
        Vec2::new(-self.y, self.x)
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec2::new(-self.x, -self.y)
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Vec2::new(self.x * k, self.y * k)
    }
}

/// Oriented rectangle (or, after fixed-point rounding, a parallelogram)
/// stored as four corners in consistent winding order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect<T> {
    pub corners: [Vec2<T>; 4],
}

impl<T: Scalar> Rect<T> {
    /// Rectangle `center ± a ± b` where `a` and `b` are the half-extent vectors.
    pub fn from_center_axes(center: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> Self {
        Rect { corners: [center + a + b, center - a + b, center - a - b, center + a - b] }
    }

    pub fn axis_aligned(center: Vec2<T>, half_x: T, half_y: T) -> Self {
        Self::from_center_axes(center, Vec2::new(half_x, T::zero()), Vec2::new(T::zero(), half_y))
    }

    pub fn edges(&self) -> [Vec2<T>; 4] {
        let c = &self.corners;
        [c[1] - c[0], c[2] - c[1], c[3] - c[2], c[0] - c[3]]
    }

    /// Projection interval of the corners onto `axis` (axis need not be unit length).
    pub fn project(&self, axis: Vec2<T>) -> (T, T) {
        let mut lo = self.corners[0].dot(axis);
        let mut hi = lo;
        for c in &self.corners[1..] {
            let p = c.dot(axis);
            if p < lo {
                lo = p;
            }
            if p > hi {
                hi = p;
            }
        }
        (lo, hi)
    }

    /// Point containment; the boundary counts as inside.
    pub fn contains(&self, p: Vec2<T>) -> bool {
        let mut pos = false;
        let mut neg = false;
        for i in 0..4 {
            let a = self.corners[i];
            let b = self.corners[(i + 1) % 4];
            let z = (b - a).cross(p - a);
            if z > T::zero() {
                pos = true;
            } else if z < T::zero() {
                neg = true;
            }
            if pos && neg {
                return false;
            }
        }
        true
    }

    /// Twice the signed area; positive for counter-clockwise winding.
    pub fn doubled_area(&self) -> T {
        let c = &self.corners;
        let mut acc = T::zero();
        for i in 0..4 {
            acc = acc + c[i].cross(c[(i + 1) % 4]);
        }
        acc
    }
}

/// Separating-axis test over the two edge normals of each rectangle.
/// Touching rectangles intersect.
pub fn rects_intersect<T: Scalar>(a: &Rect<T>, b: &Rect<T>) -> bool {
    let ea = a.edges();
    let eb = b.edges();
    let axes = [ea[0].perp(), ea[1].perp(), eb[0].perp(), eb[1].perp()];
    for axis in axes {
        if axis.x == T::zero() && axis.y == T::zero() {
            continue;
        }
        let (amin, amax) = a.project(axis);
        let (bmin, bmax) = b.project(axis);
        if amax < bmin || bmax < amin {
            return false;
        }
    }
    true
}
