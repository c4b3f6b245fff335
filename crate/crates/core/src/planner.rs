//! A* over the 8-connected inflated grid and the two path post-optimizations.
//!
//! Paths are waypoint lists that exclude the start cell. Consecutive
//! waypoints are joined by straight 8-direction runs.

use crate::geometry::{Cell, Dir, Footprint};
use crate::num::div_ceil;
use crate::worldmodel::OccupancyGrid;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use thiserror::Error;

pub type Path = Vec<Cell>;

pub const EDGE_COST: u64 = 10;
pub const DIAGONAL_COST: u64 = 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("no path from {start} to {goal}")]
    NoPath { start: Cell, goal: Cell },
    #[error("endpoint {0} is occupied or outside the grid")]
    InvalidEndpoint(Cell),
}

pub fn inflation_radius(fp: &Footprint, cell_width_mm: i64) -> i32 {
    let extent = fp.length_mm.max(fp.width_mm) + 2 * fp.safety_margin_mm;
    div_ceil(extent, 2 * cell_width_mm) as i32
}

/// Marks every cell within Chebyshev distance `inflation_radius` of an occupied cell.
pub fn inflate_grid(grid: &OccupancyGrid, fp: &Footprint) -> OccupancyGrid {
    let r = inflation_radius(fp, grid.cell_width_mm());
    let mut out = grid.clone();
    for c in grid.iter_cells().filter(|&c| grid.is_occupied(c)) {
        for dy in -r..=r {
            for dx in -r..=r {
                let n = Cell::new(c.x + dx, c.y + dy);
                if grid.in_bounds(n) {
                    out.set(n, true);
                }
            }
        }
    }
    out
}

/// Whether a single hop in `dir` from `from` lands on a free cell without
/// cutting an occupied corner.
pub fn can_step(grid: &OccupancyGrid, from: Cell, dir: Dir) -> bool {
    let to = from.step(dir);
    if grid.is_occupied(to) {
        return false;
    }
    if dir.is_diagonal() {
        let (dx, dy) = dir.delta();
        return grid.is_free(Cell::new(from.x + dx, from.y)) && grid.is_free(Cell::new(from.x, from.y + dy));
    }
    true
}

fn step_cost(dir: Dir) -> u64 {
    if dir.is_diagonal() {
        DIAGONAL_COST
    } else {
        EDGE_COST
    }
}

/// Optimal 8-connected path by A* with the octile heuristic. Among equal
/// f-scores the node with lowest h, then lowest `(y, x)`, is expanded first.
pub fn generate_path(inflated: &OccupancyGrid, start: Cell, goal: Cell) -> Result<Path, PlanError> {
    for c in [start, goal] {
        if inflated.is_occupied(c) {
            return Err(PlanError::InvalidEndpoint(c));
        }
    }
    if start == goal {
        return Ok(Vec::new());
    }
    let n = inflated.cells().len();
    let idx = |c: Cell| inflated.index(c).expect("in bounds");
    let mut g = vec![u64::MAX; n];
    let mut parent: Vec<Option<Cell>> = vec![None; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    g[idx(start)] = 0;
    let h0 = start.octile(goal);
    open.push(Reverse((h0, h0, start.y, start.x)));
    while let Some(Reverse((_, _, y, x))) = open.pop() {
        let cur = Cell::new(x, y);
        let ci = idx(cur);
        if closed[ci] {
            continue;
        }
        closed[ci] = true;
        if cur == goal {
            let mut path = vec![cur];
            let mut at = cur;
            while let Some(p) = parent[idx(at)] {
                if p == start {
                    break;
                }
                path.push(p);
                at = p;
            }
            path.reverse();
            return Ok(path);
        }
        for dir in Dir::ALL {
            if !can_step(inflated, cur, dir) {
                continue;
            }
            let next = cur.step(dir);
            let ni = idx(next);
            if closed[ni] {
                continue;
            }
            let cand = g[ci] + step_cost(dir);
            if cand < g[ni] {
                g[ni] = cand;
                parent[ni] = Some(cur);
                let h = next.octile(goal);
                open.push(Reverse((cand + h, h, next.y, next.x)));
            }
        }
    }
    Err(PlanError::NoPath { start, goal })
}

/// Cells visited hop by hop, excluding `start`. Segments that are not
/// straight 8-direction runs are passed through unchanged.
pub fn expand_path(start: Cell, path: &[Cell]) -> Vec<Cell> {
    let mut out = Vec::new();
    let mut at = start;
    for &w in path {
        match Dir::between(at, w) {
            Some(d) => {
                while at != w {
                    at = at.step(d);
                    out.push(at);
                }
            }
            None => {
                if at != w {
                    out.push(w);
                }
                at = w;
            }
        }
    }
    out
}

/// Drops every waypoint that continues the direction of the previous segment.
pub fn consolidate_waypoints(start: Cell, path: &[Cell]) -> Path {
    let mut out: Path = Vec::with_capacity(path.len());
    let mut prev = start;
    for (i, &w) in path.iter().enumerate() {
        let keep = match path.get(i + 1) {
            None => true,
            Some(&next) => {
                let a = Dir::between(prev, w);
                a.is_none() || a != Dir::between(w, next)
            }
        };
        if keep {
            out.push(w);
        }
        prev = w;
    }
    out
}

fn diagonal_run_free(grid: &OccupancyGrid, from: Cell, to: Cell) -> bool {
    let Some(dir) = Dir::between(from, to) else { return false };
    if !dir.is_diagonal() {
        return false;
    }
    let mut at = from;
    while at != to {
        if !can_step(grid, at, dir) {
            return false;
        }
        at = at.step(dir);
    }
    true
}

/// Replaces staircase stretches of the walk by straight diagonal runs where
/// the whole run is free on `inflated`. Returns the hop-by-hop walk.
pub fn eliminate_zigzag(start: Cell, path: &[Cell], inflated: &OccupancyGrid) -> Path {
    let mut walk = vec![start];
    walk.extend(expand_path(start, path));
    let mut out = Vec::with_capacity(walk.len());
    let mut i = 0;
    while i + 1 < walk.len() {
        let from = walk[i];
        let shortcut = (i + 2..walk.len()).rev().find(|&j| {
            let (dx, dy) = (walk[j].x - from.x, walk[j].y - from.y);
            dx != 0 && dx.abs() == dy.abs() && diagonal_run_free(inflated, from, walk[j])
        });
        match shortcut {
            Some(j) => {
                let d = Dir::between(from, walk[j]).expect("diagonal run");
                let mut at = from;
                while at != walk[j] {
                    at = at.step(d);
                    out.push(at);
                }
                i = j;
            }
            None => {
                out.push(walk[i + 1]);
                i += 1;
            }
        }
    }
    out
}

/// A* followed by zig-zag elimination and waypoint consolidation.
pub fn plan_route(inflated: &OccupancyGrid, start: Cell, goal: Cell) -> Result<Path, PlanError> {
    let raw = generate_path(inflated, start, goal)?;
    Ok(consolidate_waypoints(start, &eliminate_zigzag(start, &raw, inflated)))
}

/// Octile cost of the straight segments from `start` through `path`.
pub fn path_cost(start: Cell, path: &[Cell]) -> u64 {
    let mut at = start;
    let mut total = 0;
    for &w in path {
        total += at.octile(w);
        at = w;
    }
    total
}

/// Every segment is a straight 8-direction run of free cells without corner cutting.
pub fn is_walkable(start: Cell, path: &[Cell], inflated: &OccupancyGrid) -> bool {
    let mut at = start;
    for &w in path {
        let Some(d) = Dir::between(at, w) else { return false };
        while at != w {
            if !can_step(inflated, at, d) {
                return false;
            }
            at = at.step(d);
        }
    }
    true
}
