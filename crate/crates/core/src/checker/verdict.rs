use super::{Exploration, Outcome};
use serde::{Deserialize, Serialize};

/// Summary printed by `check`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub states: usize,
    pub transitions: u64,
    pub model_time_ms: i64,
    pub wall_ms: u64,
}

impl From<&Exploration> for Verdict {
    fn from(e: &Exploration) -> Self {
        Verdict {
            outcome: e.outcome,
            states: e.states,
            transitions: e.transitions,
            model_time_ms: e.max_model_time_ms,
            wall_ms: e.wall_ms,
        }
    }
}

impl Verdict {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("verdict serializes")
    }
}
