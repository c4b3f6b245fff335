use super::canonical::{digest_hex, state_digest};
use super::{Label, TraceRecord};
use crate::actors::{kernel_step, ready_count, FixedChooser, Model, ModelError, World};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("replay diverged at step {step}: {reason}")]
    ReplayDivergence { step: usize, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn divergence(step: usize, reason: impl Into<String>) -> ReplayError {
    ReplayError::ReplayDivergence { step, reason: reason.into() }
}

/// Re-executes a recorded trace from the initial state. Each record is
/// matched against the ready messages by actor, server and arguments, run
/// with its recorded branch, and checked against its recorded digest.
pub fn replay(model: &Model, trace: &[TraceRecord]) -> Result<World, ReplayError> {
    let mut world = model.initial_world();
    for rec in trace {
        let ready = ready_count(&world);
        let index = world.queue[..ready]
            .iter()
            .position(|m| m.target == rec.actor && m.server == rec.server && m.args == rec.args)
            .ok_or_else(|| {
                divergence(rec.step, format!("no ready {} message for actor {}", rec.server.name(), rec.actor))
            })?;
        if world.queue[index].arrival_ms != rec.time_ms {
            return Err(divergence(
                rec.step,
                format!("message is ready at {} ms, trace says {} ms", world.queue[index].arrival_ms, rec.time_ms),
            ));
        }
        let mut ch = FixedChooser::new(rec.branch);
        kernel_step(model, &mut world, index, &mut ch)?;
        if rec.branch >= ch.offered.unwrap_or(1) {
            return Err(divergence(rec.step, format!("branch {} is not available", rec.branch)));
        }
        let got = digest_hex(state_digest(&world));
        if got != rec.state_digest {
            return Err(divergence(rec.step, format!("state digest {got}, trace says {}", rec.state_digest)));
        }
    }
    Ok(world)
}

/// Follows transition labels from the initial state, producing the trace
/// records along the way.
pub fn replay_labels(model: &Model, labels: &[Label]) -> Result<(World, Vec<TraceRecord>), ReplayError> {
    let mut world = model.initial_world();
    let mut records = Vec::with_capacity(labels.len());
    for (i, label) in labels.iter().enumerate() {
        let ready = ready_count(&world);
        if label.msg as usize >= ready {
            return Err(divergence(i + 1, format!("message {} is not ready", label.msg)));
        }
        let mut ch = FixedChooser::new(label.branch);
        let out = kernel_step(model, &mut world, label.msg as usize, &mut ch)?;
        records.push(TraceRecord {
            step: i + 1,
            time_ms: out.executed.arrival_ms,
            actor: out.executed.target,
            server: out.executed.server,
            args: out.executed.args,
            branch: label.branch,
            state_digest: digest_hex(state_digest(&world)),
        });
    }
    Ok((world, records))
}
