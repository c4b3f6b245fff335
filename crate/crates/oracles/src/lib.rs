//! Slow, independent reference implementations that the fast code is
//! checked against. Nothing here is used by the model itself.

pub mod gen;
pub mod geometry;
pub mod search;

pub use gen::{random_grid, random_scenario, random_world};
pub use geometry::{
    exact_shadow, sampled_intersection, sweep_first_contact, to_f64, trig_reference, SampledIntersection,
};
pub use search::{dijkstra_cost, exhaustive, reachable_concrete, Exhaustive};
