//! Robot behaviour: the scan loop, movement with blocking checks, and
//! congestion back-off.

use super::kernel::Ctx;
use super::{Args, Backoff, Message, ModelError, RobotState, Server, Status, World, MAP_SERVER};
use crate::geometry::{hop_duration_ms, rotate_duration_ms, Dir};
use crate::num::{div_round, FIXED_SCALE, SQRT2_FIXED};
use crate::planner::can_step;
use crate::scenario::RobotConfig;
use crate::sensing::nearest_blocking_distance;

/// Back-off step counts offered per direction are `3`, the midpoint and `hi`,
/// with `hi = max(free cells, 10)`.
pub const MIN_BACKOFF_STEPS: u32 = 3;
pub const MAX_BACKOFF_FLOOR: u32 = 10;

pub(super) fn handle(ctx: &mut Ctx<'_>, world: &mut World, slot: usize, msg: &Message) -> Result<(), ModelError> {
    let cfg = *ctx.model.config(slot);
    let mut robot = Robot { ctx, cfg, slot, r: &mut world.robots[slot] };
    match (msg.server, &msg.args) {
        (Server::DoLaserScan, Args::None) => robot.do_laser_scan(),
        (Server::OnLaserScan, Args::Scan { matrix }) => {
            robot.r.matrix = Some(matrix.clone());
            robot.on_laser_scan();
        }
        (Server::OnNewPath, Args::NewPath { path }) => robot.on_new_path(path),
        (Server::UpdateMovingStatus, Args::None) => robot.update_moving_status(),
        (Server::DoLaserScan | Server::OnLaserScan | Server::OnNewPath | Server::UpdateMovingStatus, _) => {
            return Err(ModelError::BadArgs { server: msg.server });
        }
        (server, _) => return Err(ModelError::UnknownServer { target: msg.target, server }),
    }
    Ok(())
}

struct Robot<'c, 'a, 'w> {
    ctx: &'c mut Ctx<'a>,
    cfg: RobotConfig,
    slot: usize,
    r: &'w mut RobotState,
}

impl Robot<'_, '_, '_> {
    fn send_self(&mut self, server: Server, after_ms: i64) {
        let id = self.r.id;
        self.ctx.send(id, server, Args::None, after_ms, None);
    }

    fn do_laser_scan(&mut self) {
        if self.r.status.is_final() {
            return;
        }
        let latency = self.ctx.model.latency();
        let deadline = self.ctx.now + latency + self.cfg.params.scan_period_ms;
        let robot = self.r.id;
        self.ctx.send(MAP_SERVER, Server::ScanObstacles, Args::Robot { robot }, latency, Some(deadline));
    }

    fn on_laser_scan(&mut self) {
        if !self.r.status.is_final() {
            self.send_self(Server::DoLaserScan, self.cfg.params.scan_period_ms);
        }
    }

    fn on_new_path(&mut self, path: &[crate::geometry::Cell]) {
        self.r.awaiting_path = false;
        self.r.path = path.to_vec();
        self.r.no_path = path.is_empty() && self.r.distance2target_mm > self.cfg.params.arrival_tolerance_mm;
        if self.r.no_path {
            self.r.status = Status::Waiting;
        }
        self.send_self(Server::UpdateMovingStatus, 0);
    }

    fn update_moving_status(&mut self) {
        if self.r.status.is_final() {
            return;
        }
        if self.r.backoff.is_some() {
            self.backoff_step();
            return;
        }
        let here = self.r.pose.cell();
        while self.r.path.first() == Some(&here) {
            self.r.path.remove(0);
        }
        let Some(&next) = self.r.path.first() else {
            if self.r.distance2target_mm <= self.cfg.params.arrival_tolerance_mm {
                self.r.status = Status::Arrived;
            } else if self.r.no_path {
                self.blocked();
            } else {
                self.request_path();
            }
            return;
        };
        let dir = Dir::between(here, next)
            .or_else(|| Dir::from_delta(next.x - here.x, next.y - here.y))
            .expect("waypoint differs from current cell");
        if self.r.pose.rdir != dir {
            self.rotate_toward(dir, Status::Rotating);
        } else if self.blocking_distance(dir) > self.cfg.params.stop_zone_mm {
            self.hop(dir, Status::Moving);
        } else {
            self.blocked();
        }
    }

    /// Distance to the nearest blocking obstacle in `dir`; no scan yet, or a
    /// scan that does not cover `dir`, counts as blocked at distance 0.
    fn blocking_distance(&self, dir: Dir) -> i64 {
        self.r
            .matrix
            .as_deref()
            .and_then(|m| nearest_blocking_distance(m, dir, &self.cfg.params.footprint).ok())
            .unwrap_or(0)
    }

    fn report_location(&mut self, after_ms: i64) {
        let latency = self.ctx.model.latency();
        let (robot, pose) = (self.r.id, self.r.pose);
        self.ctx.send(
            MAP_SERVER,
            Server::UpdateRobotLocation,
            Args::Location { robot, pose },
            after_ms + latency,
            None,
        );
    }

    fn hop(&mut self, dir: Dir, status: Status) {
        let cw = self.ctx.model.grid().cell_width_mm();
        let dt = hop_duration_ms(dir.is_diagonal(), self.cfg.params.speed_mm_s, cw);
        let to = self.r.pose.cell().step(dir);
        self.r.pose.rx = to.x;
        self.r.pose.ry = to.y;
        self.r.wait_count_ms = 0;
        self.r.status = status;
        self.r.distance2target_mm = self.ctx.model.distance_mm(to, self.cfg.goal);
        self.report_location(dt);
        self.send_self(Server::UpdateMovingStatus, dt);
    }

    fn rotate_toward(&mut self, target: Dir, status: Status) {
        let from = self.r.pose.rdir;
        let to = from.turn_toward(target);
        let dt = rotate_duration_ms(from, to, self.cfg.params.angular_speed_deg_s).max(1);
        self.r.pose.rdir = to;
        self.r.status = status;
        self.report_location(dt);
        self.send_self(Server::UpdateMovingStatus, dt);
    }

    fn blocked(&mut self) {
        self.r.status = Status::Waiting;
        self.r.wait_count_ms += self.cfg.params.wait_increment_ms;
        if self.r.wait_count_ms > self.cfg.params.max_wait_ms {
            self.resolve_congestion();
        } else {
            self.send_self(Server::UpdateMovingStatus, self.cfg.params.wait_increment_ms);
        }
    }

    fn request_path(&mut self) {
        self.r.awaiting_path = true;
        self.r.status = Status::Idle;
        let latency = self.ctx.model.latency();
        let (robot, from, goal) = (self.r.id, self.r.pose.cell(), self.cfg.goal);
        self.ctx.send(MAP_SERVER, Server::GeneratePath, Args::PathRequest { robot, from, goal }, latency, None);
    }

    /// Hops available in `dir`: the free run on the inflated grid, capped by
    /// what the latest scan allows before the stop zone is reached.
    fn freespace_cells(&self, dir: Dir) -> i64 {
        let grid = self.ctx.model.inflated(self.slot);
        let limit = grid.width().max(grid.height()) as i64;
        let mut at = self.r.pose.cell();
        let mut run = 0;
        while run < limit && can_step(grid, at, dir) {
            at = at.step(dir);
            run += 1;
        }
        let d = self.blocking_distance(dir);
        let stop = self.cfg.params.stop_zone_mm;
        let cw = grid.cell_width_mm();
        let hop_len = if dir.is_diagonal() { div_round(cw * SQRT2_FIXED, FIXED_SCALE) } else { cw };
        let scanned = if d > stop { (d - stop - 1) / hop_len } else { 0 };
        run.min(scanned)
    }

    fn resolve_congestion(&mut self) {
        self.r.wait_count_ms = 0;
        self.r.reroute_count += 1;
        if self.r.reroute_count > self.cfg.params.max_reroutes {
            self.r.status = Status::Stuck;
            self.r.path.clear();
            return;
        }
        let back = self.r.pose.rdir.opposite();
        let mut options: Vec<(Dir, i64)> = [back, back.rotated(-1), back.rotated(1)]
            .into_iter()
            .map(|d| (d, self.freespace_cells(d)))
            .filter(|&(_, fs)| fs > 0)
            .collect();
        options.sort_by_key(|&(_, fs)| std::cmp::Reverse(fs));
        if options.is_empty() {
            self.r.status = Status::Waiting;
            self.send_self(Server::UpdateMovingStatus, self.cfg.params.wait_increment_ms);
            return;
        }
        let b = self.ctx.chooser.choose(options.len() as u32 * 3);
        let (dir, fs) = options[(b / 3) as usize];
        let hi = (fs as u32).max(MAX_BACKOFF_FLOOR);
        let steps = [MIN_BACKOFF_STEPS, (MIN_BACKOFF_STEPS + hi) / 2, hi][(b % 3) as usize];
        self.r.backoff = Some(Backoff { dir, remaining: steps });
        self.r.path.clear();
        self.r.no_path = false;
        self.r.status = Status::BackingOff;
        self.backoff_step();
    }

    fn backoff_step(&mut self) {
        let Backoff { dir, remaining } = self.r.backoff.expect("backing off");
        let grid = self.ctx.model.inflated(self.slot);
        if remaining == 0 || !can_step(grid, self.r.pose.cell(), dir) {
            self.finish_backoff();
        } else if self.r.pose.rdir != dir {
            self.rotate_toward(dir, Status::BackingOff);
        } else if self.blocking_distance(dir) > self.cfg.params.stop_zone_mm {
            self.r.backoff = Some(Backoff { dir, remaining: remaining - 1 });
            self.hop(dir, Status::BackingOff);
        } else {
            self.finish_backoff();
        }
    }

    fn finish_backoff(&mut self) {
        self.r.backoff = None;
        self.request_path();
    }
}
