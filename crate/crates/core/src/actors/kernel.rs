use super::{mapserver, robot, ActorId, Args, Message, Model, ModelError, Server, World, MAP_SERVER};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Resolves a handler's nondeterministic choice among `n` alternatives.
pub trait Chooser {
    fn choose(&mut self, n: u32) -> u32;
}

/// Always takes `branch`; records how many alternatives were offered.
#[derive(Clone, Debug, Default)]
pub struct FixedChooser {
    pub branch: u32,
    pub offered: Option<u32>,
}

impl FixedChooser {
    pub fn new(branch: u32) -> Self {
        FixedChooser { branch, offered: None }
    }
}

impl Chooser for FixedChooser {
    fn choose(&mut self, n: u32) -> u32 {
        assert!(n > 0, "choice among zero alternatives");
        self.offered = Some(n);
        self.branch.min(n - 1)
    }
}

/// Uniform choice from a seeded stream; records the last branch taken.
pub struct RngChooser {
    rng: ChaCha8Rng,
    pub last: Option<(u32, u32)>,
}

impl RngChooser {
    pub fn new(rng: ChaCha8Rng) -> Self {
        RngChooser { rng, last: None }
    }
}

impl Chooser for RngChooser {
    fn choose(&mut self, n: u32) -> u32 {
        let b = self.rng.gen_range(0..n);
        self.last = Some((b, n));
        b
    }
}

/// Number of messages sharing the earliest arrival time; they form a prefix
/// of the queue.
pub fn ready_count(world: &World) -> usize {
    match world.queue.first() {
        None => 0,
        Some(first) => world.queue.partition_point(|m| m.arrival_ms == first.arrival_ms),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub executed: Message,
    pub dropped: bool,
}

/// Handler-side view of the kernel: the clock, the send primitive and the
/// choice oracle.
pub(crate) struct Ctx<'a> {
    pub model: &'a Model,
    pub now: i64,
    pub out: Vec<Message>,
    pub chooser: &'a mut dyn Chooser,
}

impl Ctx<'_> {
    pub fn send(&mut self, target: ActorId, server: Server, args: Args, after_ms: i64, deadline_ms: Option<i64>) {
        self.out.push(Message { arrival_ms: self.now + after_ms, target, server, args, deadline_ms });
    }
}

/// Executes ready message `index`: the clock moves to its arrival time, an
/// expired message is dropped, otherwise its server runs to completion.
pub fn kernel_step(
    model: &Model,
    world: &mut World,
    index: usize,
    chooser: &mut dyn Chooser,
) -> Result<StepOutcome, ModelError> {
    let ready = ready_count(world);
    if index >= ready {
        return Err(ModelError::NotReady { index, ready });
    }
    let msg = world.queue.remove(index);
    debug_assert!(msg.arrival_ms >= world.now_ms);
    world.now_ms = msg.arrival_ms;
    if msg.deadline_ms.is_some_and(|d| world.now_ms > d) {
        return Ok(StepOutcome { executed: msg, dropped: true });
    }
    let mut ctx = Ctx { model, now: world.now_ms, out: Vec::new(), chooser };
    if msg.target == MAP_SERVER {
        mapserver::handle(&mut ctx, world, &msg)?;
    } else {
        let slot = model.slot_of(msg.target).ok_or(ModelError::UnknownActor(msg.target))?;
        robot::handle(&mut ctx, world, slot, &msg)?;
    }
    for m in ctx.out {
        world.enqueue(m);
    }
    Ok(StepOutcome { executed: msg, dropped: false })
}
