use super::{ActorId, Args, MapServerState, Message, RobotState, Server, Status, World, MAP_SERVER};
use crate::geometry::{shadow_of, Cell, Shadow};
use crate::num::{div_round, FIXED_SCALE, SQRT2_FIXED};
use crate::planner::{inflate_grid, plan_route};
use crate::scenario::{RobotConfig, Scenario};
use crate::sensing::StaticRayTable;
use crate::worldmodel::OccupancyGrid;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

/// Robot slot, origin and goal of a cached route.
type RouteKey = (usize, Cell, Cell);

/// Immutable context shared by every state of one scenario: configuration,
/// inflated grids, the static ray table and a route cache.
#[derive(Debug)]
pub struct Model {
    scenario: Scenario,
    inflated: Vec<Arc<OccupancyGrid>>,
    rays: StaticRayTable,
    routes: RwLock<HashMap<RouteKey, Arc<[Cell]>>>,
}

impl Model {
    pub fn new(scenario: Scenario) -> Self {
        let inflated =
            scenario.robots.iter().map(|r| Arc::new(inflate_grid(&scenario.grid, &r.params.footprint))).collect();
        let rays = StaticRayTable::new(scenario.grid.clone());
        Model { scenario, inflated, rays, routes: RwLock::new(HashMap::new()) }
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn grid(&self) -> &OccupancyGrid {
        &self.scenario.grid
    }

    pub fn robots(&self) -> &[RobotConfig] {
        &self.scenario.robots
    }

    pub fn latency(&self) -> i64 {
        self.scenario.service_latency_ms
    }

    /// Position of robot `id` in the robot vectors; robots are sorted by id.
    pub fn slot_of(&self, id: ActorId) -> Option<usize> {
        self.scenario.robots.binary_search_by_key(&id, |r| r.id).ok()
    }

    pub fn config(&self, slot: usize) -> &RobotConfig {
        &self.scenario.robots[slot]
    }

    pub fn inflated(&self, slot: usize) -> &OccupancyGrid {
        &self.inflated[slot]
    }

    pub fn rays(&self) -> &StaticRayTable {
        &self.rays
    }

    /// Optimized route on the robot's inflated grid, empty when none exists.
    pub fn route(&self, slot: usize, from: Cell, goal: Cell) -> Arc<[Cell]> {
        let key = (slot, from, goal);
        if let Some(p) = self.routes.read().expect("route cache").get(&key) {
            return p.clone();
        }
        let path: Arc<[Cell]> = plan_route(&self.inflated[slot], from, goal).unwrap_or_default().into();
        self.routes.write().expect("route cache").insert(key, path.clone());
        path
    }

    /// Octile distance between cell centres in millimeters.
    pub fn distance_mm(&self, a: Cell, b: Cell) -> i64 {
        let dx = (a.x - b.x).abs() as i64;
        let dy = (a.y - b.y).abs() as i64;
        let (lo, hi) = (dx.min(dy), dx.max(dy));
        div_round((SQRT2_FIXED * lo + FIXED_SCALE * (hi - lo)) * self.grid().cell_width_mm(), FIXED_SCALE)
    }

    /// Shadows of all robots but `slot` at the given poses.
    pub fn shadows_except(&self, poses: &[crate::geometry::DiscretePose], slot: usize) -> Vec<Shadow> {
        poses
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != slot)
            .map(|(i, &p)| shadow_of(p, &self.config(i).params.footprint, self.grid()))
            .collect()
    }

    /// Robots at their start poses, each with a route request to the map
    /// server and its first laser scan pending.
    pub fn initial_world(&self) -> World {
        let robots: Vec<RobotState> = self
            .robots()
            .iter()
            .map(|r| RobotState {
                id: r.id,
                pose: r.start_pose(),
                status: Status::Idle,
                path: Vec::new(),
                matrix: None,
                wait_count_ms: 0,
                reroute_count: 0,
                distance2target_mm: self.distance_mm(r.start, r.goal),
                awaiting_path: true,
                no_path: false,
                backoff: None,
            })
            .collect();
        let map =
            MapServerState { poses: self.robots().iter().map(|r| r.start_pose()).collect(), collision_flag: false };
        let mut world = World { now_ms: 0, robots, map, queue: Vec::new() };
        for r in self.robots() {
            world.enqueue(Message {
                arrival_ms: self.latency(),
                target: MAP_SERVER,
                server: Server::GeneratePath,
                args: Args::PathRequest { robot: r.id, from: r.start, goal: r.goal },
                deadline_ms: None,
            });
            world.enqueue(Message {
                arrival_ms: 0,
                target: r.id,
                server: Server::DoLaserScan,
                args: Args::None,
                deadline_ms: None,
            });
        }
        world
    }
}
