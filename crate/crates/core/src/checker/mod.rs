//! Explicit-state exploration, counterexample replay and seeded simulation.

mod canonical;
mod explore;
mod replay;
mod simulate;
mod trace;
mod verdict;

pub use canonical::{canonical_bytes, digest_hex, shift_times, state_digest, time_base};
pub use explore::{explore, successors, Edge, Exploration, ExploreOptions, Strategy};
pub use replay::{replay, replay_labels, ReplayError};
pub use simulate::{simulate, SimulationRun};
pub use trace::{read_trace, write_trace, TraceRecord};
pub use verdict::Verdict;

use crate::actors::World;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    AllPropertiesHold,
    Collision,
    Deadlock,
    LivelockStuck,
    BoundReached,
}

impl Outcome {
    pub fn is_violation(self) -> bool {
        matches!(self, Outcome::Collision | Outcome::Deadlock | Outcome::LivelockStuck)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::AllPropertiesHold => "ALL_PROPERTIES_HOLD",
            Outcome::Collision => "COLLISION",
            Outcome::Deadlock => "DEADLOCK",
            Outcome::LivelockStuck => "LIVELOCK_STUCK",
            Outcome::BoundReached => "BOUND_REACHED",
        }
    }
}

/// One transition: which ready message ran (its index in the canonical
/// queue) and which nondeterministic alternative its handler took.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Label {
    pub msg: u32,
    pub branch: u32,
}

/// Property status of a single state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateClass {
    Violation(Outcome),
    /// All robots arrived and nothing is pending.
    Success,
    Open,
}

pub fn classify(w: &World) -> StateClass {
    if w.map.collision_flag {
        StateClass::Violation(Outcome::Collision)
    } else if w.any_stuck() {
        StateClass::Violation(Outcome::LivelockStuck)
    } else if w.queue.is_empty() {
        if w.all_arrived() {
            StateClass::Success
        } else {
            StateClass::Violation(Outcome::Deadlock)
        }
    } else {
        StateClass::Open
    }
}
