use serde::{Deserialize, Serialize};
use std::fmt;

/// Grid cell index. Serialized as `[x, y]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(i32, i32)", into = "(i32, i32)")]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Cell { x, y }
    }

    pub fn step(self, dir: Dir) -> Cell {
        let (dx, dy) = dir.delta();
        Cell::new(self.x + dx, self.y + dy)
    }

    pub fn offset(self, dir: Dir, k: i32) -> Cell {
        let (dx, dy) = dir.delta();
        Cell::new(self.x + dx * k, self.y + dy * k)
    }

    pub fn chebyshev(self, other: Cell) -> i32 {
        (self.x - other.x).abs().max((self.y - other.y).abs())
    }

    /// Octile distance in integer units (10 per edge step, 14 per diagonal step).
    pub fn octile(self, other: Cell) -> u64 {
        let dx = (self.x - other.x).unsigned_abs() as u64;
        let dy = (self.y - other.y).unsigned_abs() as u64;
        14 * dx.min(dy) + 10 * dx.abs_diff(dy)
    }
}

impl From<(i32, i32)> for Cell {
    fn from((x, y): (i32, i32)) -> Self {
        Cell { x, y }
    }
}

impl From<Cell> for (i32, i32) {
    fn from(c: Cell) -> Self {
        (c.x, c.y)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// One of the eight discrete headings; heading in degrees is `index * 45`.
///
/// Direction 0 points along +x, direction 2 along +y (grid rows grow with y).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Dir(u8);

impl Dir {
    pub const ALL: [Dir; 8] = [Dir(0), Dir(1), Dir(2), Dir(3), Dir(4), Dir(5), Dir(6), Dir(7)];

    pub fn new(index: u8) -> Option<Dir> {
        (index < 8).then_some(Dir(index))
    }

    /// Wraps any integer onto 0..8.
    pub fn wrapping(index: i32) -> Dir {
        Dir(index.rem_euclid(8) as u8)
    }

    pub fn index(self) -> u8 {
        self.0
    }

    pub fn degrees(self) -> i32 {
        self.0 as i32 * 45
    }

    pub fn delta(self) -> (i32, i32) {
        match self.0 {
            0 => (1, 0),
            1 => (1, 1),
            2 => (0, 1),
            3 => (-1, 1),
            4 => (-1, 0),
            5 => (-1, -1),
            6 => (0, -1),
            _ => (1, -1),
        }
    }

    pub fn is_diagonal(self) -> bool {
        self.0 % 2 == 1
    }

    pub fn opposite(self) -> Dir {
        Dir((self.0 + 4) % 8)
    }

    pub fn rotated(self, steps: i32) -> Dir {
        Dir::wrapping(self.0 as i32 + steps)
    }

    /// Number of 45° increments on the shorter way between two headings (0..=4).
    pub fn steps_between(self, other: Dir) -> u8 {
        let d = (self.0 as i32 - other.0 as i32).rem_euclid(8) as u8;
        d.min(8 - d)
    }

    /// Next heading one 45° increment towards `target` on the shorter way.
    /// A half turn goes counter-clockwise (increasing index).
    pub fn turn_toward(self, target: Dir) -> Dir {
        let ccw = (target.0 as i32 - self.0 as i32).rem_euclid(8);
        match ccw {
            0 => self,
            1..=4 => self.rotated(1),
            _ => self.rotated(-1),
        }
    }

    /// Heading of the straight 8-direction run from `from` to `to`, if any.
    pub fn between(from: Cell, to: Cell) -> Option<Dir> {
        let dx = to.x - from.x;
        let dy = to.y - from.y;
        if (dx == 0 && dy == 0) || (dx != 0 && dy != 0 && dx.abs() != dy.abs()) {
            return None;
        }
        Dir::from_delta(dx.signum(), dy.signum())
    }

    /// Heading whose delta equals the signs of `(dx, dy)`.
    pub fn from_delta(dx: i32, dy: i32) -> Option<Dir> {
        Dir::ALL.into_iter().find(|d| d.delta() == (dx.signum(), dy.signum())).filter(|_| dx != 0 || dy != 0)
    }
}

impl TryFrom<u8> for Dir {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        Dir::new(v).ok_or_else(|| format!("direction {v} outside 0..=7"))
    }
}

impl From<Dir> for u8 {
    fn from(d: Dir) -> u8 {
        d.0
    }
}

/// Discretized robot pose: a grid cell and one of eight headings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiscretePose {
    pub rx: i32,
    pub ry: i32,
    pub rdir: Dir,
}

impl DiscretePose {
    pub fn new(rx: i32, ry: i32, rdir: Dir) -> Self {
        DiscretePose { rx, ry, rdir }
    }

    pub fn at(cell: Cell, rdir: Dir) -> Self {
        DiscretePose { rx: cell.x, ry: cell.y, rdir }
    }

    pub fn cell(&self) -> Cell {
        Cell::new(self.rx, self.ry)
    }
}
