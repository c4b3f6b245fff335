use fleetmc::actors::{Model, ModelError};
use fleetmc::checker::{canonical_bytes, classify, state_digest, successors, Outcome, StateClass};
use fleetmc::geometry::Cell;
use fleetmc::worldmodel::OccupancyGrid;
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

/// Cheapest 8-connected cost (10 per edge step, 14 per diagonal) from
/// `start` to `goal`. A diagonal step needs both cells it passes beside free.
pub fn dijkstra_cost(grid: &OccupancyGrid, start: Cell, goal: Cell) -> Option<u64> {
    let free = |x: i32, y: i32| grid.is_free(Cell::new(x, y));
    if !free(start.x, start.y) || !free(goal.x, goal.y) {
        return None;
    }
    let w = grid.width() as usize;
    let mut dist = vec![u64::MAX; grid.cells().len()];
    let at = |c: Cell| c.y as usize * w + c.x as usize;
    let mut heap = BinaryHeap::new();
    dist[at(start)] = 0;
    heap.push(Reverse((0u64, start.x, start.y)));
    while let Some(Reverse((d, x, y))) = heap.pop() {
        if d > dist[at(Cell::new(x, y))] {
            continue;
        }
        if (x, y) == (goal.x, goal.y) {
            return Some(d);
        }
        for dy in -1..=1 {
            for dx in -1..=1 {
                if (dx, dy) == (0, 0) || !free(x + dx, y + dy) {
                    continue;
                }
                let diagonal = dx != 0 && dy != 0;
                if diagonal && !(free(x + dx, y) && free(x, y + dy)) {
                    continue;
                }
                let nd = d + if diagonal { 14 } else { 10 };
                let n = Cell::new(x + dx, y + dy);
                if nd < dist[at(n)] {
                    dist[at(n)] = nd;
                    heap.push(Reverse((nd, n.x, n.y)));
                }
            }
        }
    }
    None
}

/// Everything reachable by expanding every execution separately, without a
/// visited set.
#[derive(Clone, Debug, Default)]
pub struct Exhaustive {
    pub digests: HashSet<u64>,
    pub terminal: BTreeSet<&'static str>,
    pub executions: u64,
}

/// Enumerates every execution of `model` from its initial state. Panics if
/// more than `max_executions` complete executions exist.
pub fn exhaustive(model: &Model, max_executions: u64) -> Result<Exhaustive, ModelError> {
    let mut out = Exhaustive::default();
    let mut stack = vec![model.initial_world()];
    while let Some(w) = stack.pop() {
        out.digests.insert(state_digest(&w));
        match classify(&w) {
            StateClass::Violation(o) => {
                out.terminal.insert(o.as_str());
                out.executions += 1;
            }
            StateClass::Success => {
                out.terminal.insert(Outcome::AllPropertiesHold.as_str());
                out.executions += 1;
            }
            StateClass::Open => stack.extend(successors(model, &w)?.into_iter().map(|(_, s)| s)),
        }
        assert!(out.executions <= max_executions, "more than {max_executions} executions");
    }
    Ok(out)
}

/// Like [`exhaustive`], but merges states that are identical including the
/// absolute clock, comparing full encodings rather than digests.
/// `executions` counts distinct terminal states.
pub fn reachable_concrete(model: &Model) -> Result<Exhaustive, ModelError> {
    let mut out = Exhaustive::default();
    let mut seen = HashSet::new();
    let mut stack = vec![model.initial_world()];
    while let Some(w) = stack.pop() {
        if !seen.insert((w.now_ms, canonical_bytes(&w))) {
            continue;
        }
        out.digests.insert(state_digest(&w));
        match classify(&w) {
            StateClass::Violation(o) => {
                out.terminal.insert(o.as_str());
                out.executions += 1;
            }
            StateClass::Success => {
                out.terminal.insert(Outcome::AllPropertiesHold.as_str());
                out.executions += 1;
            }
            StateClass::Open => stack.extend(successors(model, &w)?.into_iter().map(|(_, s)| s)),
        }
    }
    Ok(out)
}
