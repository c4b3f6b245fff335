use super::canonical::{digest_hex, state_digest};
use super::{classify, Label, Outcome, StateClass, TraceRecord};
use crate::actors::{kernel_step, Model, ModelError, RngChooser, World};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct SimulationRun {
    pub seed: u64,
    pub outcome: Outcome,
    pub trace: Vec<TraceRecord>,
    pub labels: Vec<Label>,
    pub final_world: World,
}

/// One run. Among equal-time messages the one for the lowest actor id runs
/// first (ties broken by canonical queue order); handler alternatives are
/// drawn uniformly from a ChaCha8 stream seeded with `seed`.
pub fn simulate(model: &Model, seed: u64, max_model_time_ms: i64) -> Result<SimulationRun, ModelError> {
    let mut chooser = RngChooser::new(ChaCha8Rng::seed_from_u64(seed));
    let mut world = model.initial_world();
    let mut trace = Vec::new();
    let mut labels = Vec::new();
    let outcome = loop {
        match classify(&world) {
            StateClass::Violation(o) => break o,
            StateClass::Success => break Outcome::AllPropertiesHold,
            StateClass::Open => {}
        }
        if world.queue[0].arrival_ms > max_model_time_ms {
            break Outcome::BoundReached;
        }
        chooser.last = None;
        let out = kernel_step(model, &mut world, 0, &mut chooser)?;
        let branch = chooser.last.map_or(0, |(b, _)| b);
        labels.push(Label { msg: 0, branch });
        trace.push(TraceRecord {
            step: trace.len() + 1,
            time_ms: out.executed.arrival_ms,
            actor: out.executed.target,
            server: out.executed.server,
            args: out.executed.args,
            branch,
            state_digest: digest_hex(state_digest(&world)),
        });
    };
    Ok(SimulationRun { seed, outcome, trace, labels, final_world: world })
}
