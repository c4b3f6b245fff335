//! Scalar abstraction and fixed-point helpers.
//!
//! Model state is kept in integers (millimeters, milliseconds, degrees) so
//! that state hashes are identical on every platform. The geometry kernel is
//! generic over [`Scalar`] so the same separating-axis code runs on exact
//! `i64` coordinates in the model and on `f64` in test oracles.

use num_traits::{Num, Signed};
use std::fmt::Debug;

/// Signed numeric type usable as a coordinate.
pub trait Scalar: Num + Signed + Copy + PartialOrd + Debug {}

impl<T> Scalar for T where T: Num + Signed + Copy + PartialOrd + Debug {}

/// Fixed-point scale of trigonometric values.
pub const FIXED_SCALE: i64 = 10_000;

/// `sqrt(2)` at [`FIXED_SCALE`].
pub const SQRT2_FIXED: i64 = 14_142;

/// Integer division rounding half away from zero.
///
/// Panics if `den` is zero.
pub fn div_round(num: i64, den: i64) -> i64 {
    assert!(den != 0, "division by zero");
    let (n, d) = if den < 0 { (-num, -den) } else { (num, den) };
    if n >= 0 {
        (2 * n + d) / (2 * d)
    } else {
        -((-2 * n + d) / (2 * d))
    }
}

/// Integer division rounding towards positive infinity, for non-negative operands.
pub fn div_ceil(num: i64, den: i64) -> i64 {
    debug_assert!(num >= 0 && den > 0);
    (num + den - 1) / den
}
