//! Timed-actor kernel and the two actor roles.
//!
//! Every handler runs to completion at its message's arrival time and may
//! emit further messages delayed by `after` offsets. Actor 0 is the map
//! server; robots use their scenario ids.

mod kernel;
mod mapserver;
mod model;
mod robot;

pub use kernel::{kernel_step, ready_count, Chooser, FixedChooser, RngChooser, StepOutcome};
pub use model::Model;

use crate::geometry::{Cell, DiscretePose};
use crate::planner::Path;
use crate::sensing::ObstacleMatrix;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

pub type ActorId = u16;

pub const MAP_SERVER: ActorId = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("no actor with id {0}")]
    UnknownActor(ActorId),
    #[error("actor {target} has no server `{server:?}`")]
    UnknownServer { target: ActorId, server: Server },
    #[error("server `{server:?}` received malformed arguments")]
    BadArgs { server: Server },
    #[error("message index {index} is not ready ({ready} ready)")]
    NotReady { index: usize, ready: usize },
}

/// Message server names. Declaration order is the canonical tie order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Server {
    ScanObstacles,
    GeneratePath,
    UpdateRobotLocation,
    OnNewPath,
    OnLaserScan,
    UpdateMovingStatus,
    DoLaserScan,
}

impl Server {
    pub fn name(self) -> &'static str {
        match self {
            Server::ScanObstacles => "scanObstacles",
            Server::GeneratePath => "generatePath",
            Server::UpdateRobotLocation => "updateRobotLocation",
            Server::OnNewPath => "onNewPath",
            Server::OnLaserScan => "onLaserScan",
            Server::UpdateMovingStatus => "updateMovingStatus",
            Server::DoLaserScan => "doLaserScan",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Args {
    None,
    Robot { robot: ActorId },
    PathRequest { robot: ActorId, from: Cell, goal: Cell },
    Location { robot: ActorId, pose: DiscretePose },
    NewPath { path: Arc<[Cell]> },
    Scan { matrix: Arc<ObstacleMatrix> },
}

/// Pending message. The derived order is the canonical queue order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Message {
    pub arrival_ms: i64,
    pub target: ActorId,
    pub server: Server,
    pub args: Args,
    pub deadline_ms: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Idle,
    Rotating,
    Moving,
    Waiting,
    BackingOff,
    Arrived,
    Stuck,
}

impl Status {
    pub fn is_final(self) -> bool {
        matches!(self, Status::Arrived | Status::Stuck)
    }
}

/// Ongoing congestion back-off: direction and hops left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Backoff {
    pub dir: crate::geometry::Dir,
    pub remaining: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RobotState {
    pub id: ActorId,
    pub pose: DiscretePose,
    pub status: Status,
    /// Remaining waypoints; index 0 is the next one.
    pub path: Path,
    pub matrix: Option<Arc<ObstacleMatrix>>,
    pub wait_count_ms: i64,
    pub reroute_count: u32,
    pub distance2target_mm: i64,
    pub awaiting_path: bool,
    pub no_path: bool,
    pub backoff: Option<Backoff>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MapServerState {
    /// Last reported pose per robot, in robot order.
    pub poses: Vec<DiscretePose>,
    pub collision_flag: bool,
}

/// Complete model state: clock, actor states and the pending queue kept in
/// canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct World {
    pub now_ms: i64,
    pub robots: Vec<RobotState>,
    pub map: MapServerState,
    pub queue: Vec<Message>,
}

impl World {
    pub fn enqueue(&mut self, msg: Message) {
        let at = self.queue.partition_point(|m| m <= &msg);
        self.queue.insert(at, msg);
    }

    pub fn all_arrived(&self) -> bool {
        self.robots.iter().all(|r| r.status == Status::Arrived)
    }

    pub fn any_stuck(&self) -> bool {
        self.robots.iter().any(|r| r.status == Status::Stuck)
    }

    pub fn robot(&self, id: ActorId) -> Option<&RobotState> {
        self.robots.iter().find(|r| r.id == id)
    }
}
