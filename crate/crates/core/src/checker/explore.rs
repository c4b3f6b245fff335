use super::canonical::state_digest;
use super::{classify, Label, Outcome, StateClass};
use crate::actors::{kernel_step, ready_count, FixedChooser, Model, ModelError, World};
use rayon::prelude::*;
use std::collections::{HashMap, HashSet};
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Depth-first search, iteratively deepened on model time.
    Dfs,
    /// Level-synchronous breadth-first search.
    Bfs,
}

#[derive(Clone, Debug)]
pub struct ExploreOptions {
    pub max_model_time_ms: i64,
    pub max_states: usize,
    pub strategy: Strategy,
    /// Worker threads for successor generation in breadth-first mode.
    pub jobs: usize,
    /// First model-time bound of the iterative deepening.
    pub initial_bound_ms: i64,
    pub stop_on_violation: bool,
    pub record_edges: bool,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions {
            max_model_time_ms: 600_000,
            max_states: 5_000_000,
            strategy: Strategy::Dfs,
            jobs: 1,
            initial_bound_ms: 10_000,
            stop_on_violation: true,
            record_edges: false,
        }
    }
}

/// Transition between two canonical states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: u64,
    pub label: Label,
    pub to: u64,
}

#[derive(Clone, Debug)]
pub struct Exploration {
    pub outcome: Outcome,
    /// Transition labels from the initial state to the first violation found.
    pub counterexample: Option<Vec<Label>>,
    pub states: usize,
    pub transitions: u64,
    pub max_model_time_ms: i64,
    pub wall_ms: u64,
    pub violations_found: usize,
    pub edges: Option<HashSet<Edge>>,
}

/// All successors of `world` in label order: every ready message, and for
/// handlers that branch, every alternative.
pub fn successors(model: &Model, world: &World) -> Result<Vec<(Label, World)>, ModelError> {
    let mut out = Vec::new();
    for i in 0..ready_count(world) {
        let mut next = world.clone();
        let mut ch = FixedChooser::new(0);
        kernel_step(model, &mut next, i, &mut ch)?;
        out.push((Label { msg: i as u32, branch: 0 }, next));
        for b in 1..ch.offered.unwrap_or(1) {
            let mut alt = world.clone();
            kernel_step(model, &mut alt, i, &mut FixedChooser::new(b))?;
            out.push((Label { msg: i as u32, branch: b }, alt));
        }
    }
    Ok(out)
}

/// Earliest clock at which a state was reached, and the transition that reached it.
type Visit = (i64, Option<(u64, Label)>);

/// A successor state with its label and digest.
type Successor = (Label, World, u64);

struct Search<'a> {
    model: &'a Model,
    opts: &'a ExploreOptions,
    transitions: u64,
    max_time: i64,
    violation: Option<(Outcome, Vec<Label>)>,
    violations_found: usize,
    edges: Option<HashSet<Edge>>,
}

enum Pass {
    /// Finished; `cut` tells whether some state was left unexpanded by the time bound.
    Complete {
        cut: bool,
        states: usize,
    },
    Violation {
        states: usize,
    },
    StateLimit {
        states: usize,
    },
}

impl<'a> Search<'a> {
    fn new(model: &'a Model, opts: &'a ExploreOptions) -> Self {
        Search { model, opts, transitions: 0, max_time: 0, violation: None, violations_found: 0, edges: None }
    }

    fn reset(&mut self) {
        self.transitions = 0;
        self.violations_found = 0;
        self.violation = None;
        self.edges = self.opts.record_edges.then(HashSet::new);
    }

    fn note_violation(&mut self, outcome: Outcome, path: impl FnOnce() -> Vec<Label>) -> bool {
        self.violations_found += 1;
        if self.violation.is_none() {
            self.violation = Some((outcome, path()));
        }
        self.opts.stop_on_violation
    }

    fn dfs(&mut self, bound: i64) -> Result<Pass, ModelError> {
        struct Frame {
            world: World,
            digest: u64,
            label: Option<Label>,
            next_msg: usize,
            next_branch: u32,
            branches: u32,
            ready: usize,
        }
        let frame = |world: World, digest, label| {
            let ready = ready_count(&world);
            Frame { world, digest, label, next_msg: 0, next_branch: 0, branches: 1, ready }
        };
        let init = self.model.initial_world();
        let mut visited: HashMap<u64, i64> = HashMap::new();
        let d0 = state_digest(&init);
        visited.insert(d0, init.now_ms);
        if let StateClass::Violation(o) = classify(&init) {
            self.note_violation(o, Vec::new);
            return Ok(Pass::Violation { states: 1 });
        }
        let mut cut = false;
        let mut stack = vec![frame(init, d0, None)];
        while let Some(top) = stack.last_mut() {
            if top.next_msg >= top.ready {
                stack.pop();
                continue;
            }
            let label = Label { msg: top.next_msg as u32, branch: top.next_branch };
            let mut next = top.world.clone();
            let mut ch = FixedChooser::new(top.next_branch);
            kernel_step(self.model, &mut next, top.next_msg, &mut ch)?;
            if top.next_branch == 0 {
                top.branches = ch.offered.unwrap_or(1);
            }
            top.next_branch += 1;
            if top.next_branch >= top.branches {
                top.next_msg += 1;
                top.next_branch = 0;
            }
            let from = top.digest;
            self.transitions += 1;
            self.max_time = self.max_time.max(next.now_ms);
            let d = state_digest(&next);
            if let Some(edges) = &mut self.edges {
                edges.insert(Edge { from, label, to: d });
            }
            match visited.get(&d) {
                Some(&t) if t <= next.now_ms => continue,
                _ => {
                    visited.insert(d, next.now_ms);
                }
            }
            match classify(&next) {
                StateClass::Violation(o) => {
                    let path = || stack.iter().filter_map(|f| f.label).chain(std::iter::once(label)).collect();
                    if self.note_violation(o, path) {
                        return Ok(Pass::Violation { states: visited.len() });
                    }
                    continue;
                }
                StateClass::Success => continue,
                StateClass::Open => {}
            }
            if visited.len() >= self.opts.max_states {
                return Ok(Pass::StateLimit { states: visited.len() });
            }
            if next.now_ms > bound {
                cut = true;
                continue;
            }
            stack.push(frame(next, d, Some(label)));
        }
        let states = visited.len();
        Ok(if self.violation.is_some() { Pass::Violation { states } } else { Pass::Complete { cut, states } })
    }

    fn bfs(&mut self, bound: i64) -> Result<Pass, ModelError> {
        let init = self.model.initial_world();
        let d0 = state_digest(&init);
        let mut visited: HashMap<u64, Visit> = HashMap::new();
        visited.insert(d0, (init.now_ms, None));
        if let StateClass::Violation(o) = classify(&init) {
            self.note_violation(o, Vec::new);
            return Ok(Pass::Violation { states: 1 });
        }
        let path_to = |visited: &HashMap<u64, Visit>, mut d: u64| {
            let mut labels = Vec::new();
            while let Some(&(_, Some((parent, label)))) = visited.get(&d) {
                labels.push(label);
                d = parent;
            }
            labels.reverse();
            labels
        };
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.opts.jobs.max(1)).build().expect("thread pool");
        let model = self.model;
        let mut cut = false;
        let mut frontier = vec![(init, d0)];
        while !frontier.is_empty() {
            let expanded: Vec<Result<Vec<Successor>, ModelError>> = pool.install(|| {
                frontier
                    .par_iter()
                    .map(|(w, _)| {
                        Ok(successors(model, w)?
                            .into_iter()
                            .map(|(l, s)| {
                                let d = state_digest(&s);
                                (l, s, d)
                            })
                            .collect())
                    })
                    .collect()
            });
            let mut next_frontier = Vec::new();
            for ((_, from), succs) in frontier.iter().zip(expanded) {
                for (label, next, d) in succs? {
                    self.transitions += 1;
                    self.max_time = self.max_time.max(next.now_ms);
                    if let Some(edges) = &mut self.edges {
                        edges.insert(Edge { from: *from, label, to: d });
                    }
                    match visited.get(&d) {
                        Some(&(t, _)) if t <= next.now_ms => continue,
                        _ => {
                            visited.insert(d, (next.now_ms, Some((*from, label))));
                        }
                    }
                    match classify(&next) {
                        StateClass::Violation(o) => {
                            if self.note_violation(o, || path_to(&visited, d)) {
                                return Ok(Pass::Violation { states: visited.len() });
                            }
                            continue;
                        }
                        StateClass::Success => continue,
                        StateClass::Open => {}
                    }
                    if visited.len() >= self.opts.max_states {
                        return Ok(Pass::StateLimit { states: visited.len() });
                    }
                    if next.now_ms > bound {
                        cut = true;
                        continue;
                    }
                    next_frontier.push((next, d));
                }
            }
            frontier = next_frontier;
        }
        let states = visited.len();
        Ok(if self.violation.is_some() { Pass::Violation { states } } else { Pass::Complete { cut, states } })
    }
}

/// Explores every interleaving of equal-time messages and every enumerated
/// handler alternative, pruning states already reached no later in model time.
pub fn explore(model: &Model, opts: &ExploreOptions) -> Result<Exploration, ModelError> {
    let started = Instant::now();
    let mut search = Search::new(model, opts);
    let max = opts.max_model_time_ms;
    let mut bound = match opts.strategy {
        Strategy::Dfs => opts.initial_bound_ms.clamp(1, max.max(1)),
        Strategy::Bfs => max,
    };
    let (outcome, states) = loop {
        search.reset();
        let pass = match opts.strategy {
            Strategy::Dfs => search.dfs(bound)?,
            Strategy::Bfs => search.bfs(bound)?,
        };
        match pass {
            Pass::Violation { states } => {
                break (search.violation.as_ref().map(|v| v.0).expect("violation recorded"), states);
            }
            Pass::StateLimit { states } => break (Outcome::BoundReached, states),
            Pass::Complete { cut: false, states } => break (Outcome::AllPropertiesHold, states),
            Pass::Complete { cut: true, states } => {
                if bound >= max {
                    break (Outcome::BoundReached, states);
                }
                bound = bound.saturating_mul(2).min(max);
            }
        }
    };
    Ok(Exploration {
        outcome,
        counterexample: search.violation.map(|v| v.1),
        states,
        transitions: search.transitions,
        max_model_time_ms: search.max_time,
        wall_ms: started.elapsed().as_millis() as u64,
        violations_found: search.violations_found,
        edges: search.edges,
    })
}
