//! Canonical state encoding. Every time field is written relative to the
//! earliest pending arrival (the clock itself when the queue is empty), so
//! states that differ only by a uniform time shift encode identically. The
//! clock is not part of the encoding.

use crate::actors::{Args, Message, RobotState, World};
use crate::geometry::{Cell, DiscretePose};
use crate::sensing::ObstacleMatrix;
use std::hash::Hasher;
use twox_hash::XxHash64;

trait Sink {
    fn put(&mut self, bytes: &[u8]);

    fn u8(&mut self, v: u8) {
        self.put(&[v]);
    }
    fn u16(&mut self, v: u16) {
        self.put(&v.to_le_bytes());
    }
    fn u32(&mut self, v: u32) {
        self.put(&v.to_le_bytes());
    }
    fn i32(&mut self, v: i32) {
        self.put(&v.to_le_bytes());
    }
    fn i64(&mut self, v: i64) {
        self.put(&v.to_le_bytes());
    }
    fn bool(&mut self, v: bool) {
        self.u8(v as u8);
    }
    fn cell(&mut self, c: Cell) {
        self.i32(c.x);
        self.i32(c.y);
    }
    fn pose(&mut self, p: DiscretePose) {
        self.i32(p.rx);
        self.i32(p.ry);
        self.u8(p.rdir.index());
    }
    fn len(&mut self, n: usize) {
        self.u32(n as u32);
    }
}

impl Sink for Vec<u8> {
    fn put(&mut self, bytes: &[u8]) {
        self.extend_from_slice(bytes);
    }
}

impl Sink for XxHash64 {
    fn put(&mut self, bytes: &[u8]) {
        self.write(bytes);
    }
}

fn matrix(s: &mut impl Sink, m: &ObstacleMatrix, base: i64) {
    s.i32(m.beam_step_deg);
    s.i32(m.fov_deg);
    s.i32(m.start_deg);
    s.i64(m.max_range_mm);
    s.i64(m.scan_time_ms - base);
    s.len(m.distances.len());
    for &d in &m.distances {
        s.i64(d);
    }
}

fn robot(s: &mut impl Sink, r: &RobotState, base: i64) {
    s.u16(r.id);
    s.pose(r.pose);
    s.u8(r.status as u8);
    s.len(r.path.len());
    for &c in &r.path {
        s.cell(c);
    }
    match &r.matrix {
        None => s.u8(0),
        Some(m) => {
            s.u8(1);
            matrix(s, m, base);
        }
    }
    s.i64(r.wait_count_ms);
    s.u32(r.reroute_count);
    s.i64(r.distance2target_mm);
    s.bool(r.awaiting_path);
    s.bool(r.no_path);
    match r.backoff {
        None => s.u8(0),
        Some(b) => {
            s.u8(1);
            s.u8(b.dir.index());
            s.u32(b.remaining);
        }
    }
}

fn args(s: &mut impl Sink, a: &Args, base: i64) {
    match a {
        Args::None => s.u8(0),
        Args::Robot { robot } => {
            s.u8(1);
            s.u16(*robot);
        }
        Args::PathRequest { robot, from, goal } => {
            s.u8(2);
            s.u16(*robot);
            s.cell(*from);
            s.cell(*goal);
        }
        Args::Location { robot, pose } => {
            s.u8(3);
            s.u16(*robot);
            s.pose(*pose);
        }
        Args::NewPath { path } => {
            s.u8(4);
            s.len(path.len());
            for &c in path.iter() {
                s.cell(c);
            }
        }
        Args::Scan { matrix: m } => {
            s.u8(5);
            matrix(s, m, base);
        }
    }
}

fn message(s: &mut impl Sink, m: &Message, base: i64) {
    s.i64(m.arrival_ms - base);
    s.u16(m.target);
    s.u8(m.server as u8);
    args(s, &m.args, base);
    match m.deadline_ms {
        None => s.u8(0),
        Some(d) => {
            s.u8(1);
            s.i64(d - base);
        }
    }
}

/// Reference time subtracted from every time field.
pub fn time_base(w: &World) -> i64 {
    w.queue.first().map_or(w.now_ms, |m| m.arrival_ms)
}

fn encode(s: &mut impl Sink, w: &World) {
    let base = time_base(w);
    s.len(w.robots.len());
    for r in &w.robots {
        robot(s, r, base);
    }
    s.len(w.map.poses.len());
    for &p in &w.map.poses {
        s.pose(p);
    }
    s.bool(w.map.collision_flag);
    s.len(w.queue.len());
    for m in &w.queue {
        message(s, m, base);
    }
}

pub fn canonical_bytes(w: &World) -> Vec<u8> {
    let mut out = Vec::with_capacity(1024);
    encode(&mut out, w);
    out
}

/// 64-bit XxHash (seed 0) of the canonical encoding.
pub fn state_digest(w: &World) -> u64 {
    let mut h = XxHash64::with_seed(0);
    encode(&mut h, w);
    h.finish()
}

pub fn digest_hex(d: u64) -> String {
    format!("{d:016x}")
}

/// Adds `delta` to every time field: the clock, arrivals, deadlines and scan times.
pub fn shift_times(w: &World, delta: i64) -> World {
    let mut out = w.clone();
    out.now_ms += delta;
    let shift_matrix = |m: &std::sync::Arc<ObstacleMatrix>| {
        let mut m2 = (**m).clone();
        m2.scan_time_ms += delta;
        std::sync::Arc::new(m2)
    };
    for r in &mut out.robots {
        if let Some(m) = &r.matrix {
            r.matrix = Some(shift_matrix(m));
        }
    }
    for msg in &mut out.queue {
        msg.arrival_ms += delta;
        if let Some(d) = &mut msg.deadline_ms {
            *d += delta;
        }
        if let Args::Scan { matrix } = &msg.args {
            msg.args = Args::Scan { matrix: shift_matrix(matrix) };
        }
    }
    out
}
