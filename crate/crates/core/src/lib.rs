//! Timed-actor model checker and simulator for fleets of grid-navigating robots.
//!
//! The static world is an occupancy grid; robots and a map server exchange
//! timed messages. [`checker::explore`] enumerates every interleaving of
//! equal-time messages and every congestion back-off alternative, checking
//! collision freedom, deadlock freedom and the rerouting bound.
//! [`checker::simulate`] runs a single seeded execution of the same model.
//!
//! Model state is all-integer. The geometry kernel is generic over
//! [`num::Scalar`]; the aliases below fix the coordinate type used by the model.

pub mod actors;
pub mod checker;
pub mod geometry;
pub mod num;
pub mod planner;
pub mod scenario;
pub mod sensing;
pub mod worldmodel;

pub use geometry::Shadow;
pub use worldmodel::WorldPoint;

/// Exact integer rectangle, the model's coordinate type.
pub type RectI = geometry::Rect<i64>;
/// Floating-point rectangle, for reference computations.
pub type RectF = geometry::Rect<f64>;
/// Floating-point point, for reference computations.
pub type PointF = geometry::Vec2<f64>;
